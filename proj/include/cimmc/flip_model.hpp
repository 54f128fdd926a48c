#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cimmc/random_stream.hpp"

namespace cimmc {

// Parametric bit-flip probability of a bitcell under pseudo-read.
// The flip probability is interpolated piecewise-linearly over supply
// voltage anchors, clamped at both ends, and scaled by a temperature
// curve. Immutable after construction and safe to share.
class FlipModel {
 public:
  using Curve = std::vector<std::pair<double, double>>;

  FlipModel(Curve cvdd_anchors, Curve temp_scale,
            std::optional<double> flip01 = std::nullopt,
            std::optional<double> flip10 = std::nullopt);

  // Anchors: 45% at 0.5 V, 40% at 0.6 V, no flips at nominal 0.8 V.
  // Temperature: flat in [-20, 85] C, linear decrease to 0.40/0.45 at -40 C.
  static FlipModel defaults();

  // Flat flip probability independent of voltage and temperature.
  static FlipModel constant(double p);

  double bfr_at(double cvdd, double temperature) const;

  // Flip probability for a cell currently holding `current`, honoring the
  // optional asymmetric overrides. Defaults to bfr_at.
  double flip_prob(int current, double cvdd, double temperature) const;

  bool symmetric() const { return !flip01_ && !flip10_; }
  const Curve& anchors() const { return anchors_; }
  const Curve& temp_scale() const { return temp_scale_; }

 private:
  Curve anchors_;     // (cvdd, p_flip), strictly increasing in cvdd
  Curve temp_scale_;  // (temperature, multiplicative scale)
  std::optional<double> flip01_;
  std::optional<double> flip10_;
};

// Returns the complement of `current` with probability p, else `current`.
inline int flip_bit(int current, double p, RandomStream& rng) {
  return rng.bernoulli(p) ? (current ^ 1) : current;
}

}  // namespace cimmc

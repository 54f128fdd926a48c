#include "cimmc/flip_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cimmc {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must be in [0,1]");
  }
}

double interp_clamped(const FlipModel::Curve& curve, double x) {
  if (curve.empty()) return 1.0;
  if (x <= curve.front().first) return curve.front().second;
  if (x >= curve.back().first) return curve.back().second;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (x <= curve[i].first) {
      const auto& [x0, y0] = curve[i - 1];
      const auto& [x1, y1] = curve[i];
      const double t = (x - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return curve.back().second;
}

}  // namespace

FlipModel::FlipModel(Curve cvdd_anchors, Curve temp_scale,
                     std::optional<double> flip01, std::optional<double> flip10)
    : anchors_(std::move(cvdd_anchors)),
      temp_scale_(std::move(temp_scale)),
      flip01_(flip01),
      flip10_(flip10) {
  if (anchors_.empty()) throw std::invalid_argument("flip model needs at least one cvdd anchor");
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    check_probability(anchors_[i].second, "anchor p_flip");
    if (i > 0) {
      if (anchors_[i].first <= anchors_[i - 1].first) {
        throw std::invalid_argument("cvdd anchors must be strictly increasing");
      }
      if (anchors_[i].second > anchors_[i - 1].second) {
        throw std::invalid_argument("p_flip must be non-increasing in cvdd");
      }
    }
  }
  for (std::size_t i = 0; i < temp_scale_.size(); ++i) {
    if (temp_scale_[i].second < 0.0) throw std::invalid_argument("temperature scale must be >= 0");
    if (i > 0 && temp_scale_[i].first <= temp_scale_[i - 1].first) {
      throw std::invalid_argument("temperature anchors must be strictly increasing");
    }
  }
  if (flip01_) check_probability(*flip01_, "flip01");
  if (flip10_) check_probability(*flip10_, "flip10");
}

FlipModel FlipModel::defaults() {
  return FlipModel({{0.5, 0.45}, {0.6, 0.40}, {0.8, 0.0}},
                   {{-40.0, 0.40 / 0.45}, {-20.0, 1.0}, {85.0, 1.0}});
}

FlipModel FlipModel::constant(double p) {
  check_probability(p, "p_flip");
  return FlipModel({{0.5, p}}, {});
}

double FlipModel::bfr_at(double cvdd, double temperature) const {
  if (!std::isfinite(cvdd) || !std::isfinite(temperature)) {
    throw std::invalid_argument("cvdd and temperature must be finite");
  }
  double p = interp_clamped(anchors_, cvdd) * interp_clamped(temp_scale_, temperature);
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double FlipModel::flip_prob(int current, double cvdd, double temperature) const {
  if (current == 0 && flip01_) return *flip01_;
  if (current == 1 && flip10_) return *flip10_;
  return bfr_at(cvdd, temperature);
}

}  // namespace cimmc

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cimmc/macro_array.hpp"
#include "cimmc/random_stream.hpp"

namespace cimmc {

struct Histogram {
  std::vector<long long> bins;
  long long total = 0;

  static Histogram from_samples(const std::vector<std::uint64_t>& samples, std::size_t n_bins);
  void add(std::uint64_t value);
};

// 1/2 sum |empirical_i - normalized_target_i|; target is normalized inside.
double tv_distance(const Histogram& hist, const std::vector<double>& target);

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  long dof = 0;
  long merged_bins = 0;
};

// Pearson goodness of fit. Adjacent bins are merged deterministically until
// each expected count reaches min_expected. Assumes independent draws.
GofResult chi_square_gof(const Histogram& hist, const std::vector<double>& target,
                         double min_expected = 5.0);

// Frequency of bit=1 at each of the 8 output positions.
std::array<double, 8> monobit_bias(const std::vector<std::uint8_t>& u8_samples);

// Frequency vector of pseudo_read outcomes from repeated (write x, pseudo_read).
std::vector<double> empirical_transfer_row(MacroArray& array, std::uint64_t x, int n_bits,
                                           double cvdd, double temperature, long trials,
                                           RandomStream& rng);

// Regularized incomplete gamma functions, series + continued fraction.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double statistic, long dof);

}  // namespace cimmc

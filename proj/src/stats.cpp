#include "cimmc/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cimmc {

Histogram Histogram::from_samples(const std::vector<std::uint64_t>& samples, std::size_t n_bins) {
  Histogram h;
  h.bins.assign(n_bins, 0);
  for (std::uint64_t s : samples) h.add(s);
  return h;
}

void Histogram::add(std::uint64_t value) {
  if (value >= bins.size()) throw std::out_of_range("sample outside histogram domain");
  bins[value] += 1;
  total += 1;
}

namespace {

std::vector<double> normalize(const std::vector<double>& target) {
  double sum = 0.0;
  for (double v : target) {
    if (v < 0.0) throw std::invalid_argument("target densities must be nonnegative");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("target must have positive mass");
  std::vector<double> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) out[i] = target[i] / sum;
  return out;
}

}  // namespace

double tv_distance(const Histogram& hist, const std::vector<double>& target) {
  if (hist.bins.size() != target.size()) throw std::invalid_argument("domain size mismatch");
  if (hist.total <= 0) throw std::invalid_argument("histogram is empty");
  const auto p = normalize(target);
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tv += std::abs(static_cast<double>(hist.bins[i]) / hist.total - p[i]);
  }
  return 0.5 * tv;
}

GofResult chi_square_gof(const Histogram& hist, const std::vector<double>& target,
                         double min_expected) {
  if (hist.bins.size() != target.size()) throw std::invalid_argument("domain size mismatch");
  if (hist.total <= 0) throw std::invalid_argument("histogram is empty");
  const auto p = normalize(target);

  // Merge adjacent bins until the expected count reaches min_expected;
  // a short tail is folded into the last merged bin.
  std::vector<double> obs_m, exp_m;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    obs_acc += static_cast<double>(hist.bins[i]);
    exp_acc += p[i] * hist.total;
    if (exp_acc >= min_expected) {
      obs_m.push_back(obs_acc);
      exp_m.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (obs_m.empty()) throw std::domain_error("chi-square needs at least two usable bins");
    obs_m.back() += obs_acc;
    exp_m.back() += exp_acc;
  }
  if (obs_m.size() < 2) throw std::domain_error("chi-square needs at least two usable bins");

  GofResult r;
  r.merged_bins = static_cast<long>(obs_m.size());
  r.dof = r.merged_bins - 1;
  for (std::size_t i = 0; i < obs_m.size(); ++i) {
    const double d = obs_m[i] - exp_m[i];
    r.statistic += d * d / exp_m[i];
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

std::array<double, 8> monobit_bias(const std::vector<std::uint8_t>& u8_samples) {
  if (u8_samples.empty()) throw std::invalid_argument("monobit needs at least one sample");
  std::array<long long, 8> ones{};
  for (std::uint8_t v : u8_samples) {
    for (int b = 0; b < 8; ++b) ones[b] += (v >> b) & 1;
  }
  std::array<double, 8> freq{};
  for (int b = 0; b < 8; ++b) {
    freq[b] = static_cast<double>(ones[b]) / static_cast<double>(u8_samples.size());
  }
  return freq;
}

std::vector<double> empirical_transfer_row(MacroArray& array, std::uint64_t x, int n_bits,
                                           double cvdd, double temperature, long trials,
                                           RandomStream& rng) {
  if (trials < 10000) throw std::invalid_argument("transfer row estimate needs >= 1e4 trials");
  std::vector<long long> counts(std::size_t{1} << n_bits, 0);
  const GroupAddr addr{0, 0, 0};
  // Ledger noise from repeated trials is not meaningful here.
  PerfLedger* saved = array.ledger();
  array.set_ledger(nullptr);
  for (long t = 0; t < trials; ++t) {
    array.write(addr, x, n_bits);
    counts[array.pseudo_read(addr, n_bits, cvdd, temperature, rng)] += 1;
  }
  array.set_ledger(saved);
  std::vector<double> freq(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  }
  return freq;
}

// Incomplete gamma by series expansion, for x < a + 1.
double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x >= a + 1.0) return 1.0 - regularized_gamma_q(a, x);
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Incomplete gamma by modified Lentz continued fraction, for x >= a + 1.
double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - regularized_gamma_p(a, x);
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double chi_square_sf(double statistic, long dof) {
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  if (statistic < 0.0) throw std::invalid_argument("statistic must be nonnegative");
  return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

}  // namespace cimmc

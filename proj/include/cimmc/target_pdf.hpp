#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cimmc {

struct GaussComponent {
  double weight;
  double mean;
  double sigma;
};

// Sum of weighted Gaussian densities, unnormalized by the weight sum.
double gmm_pdf(double x, const std::vector<GaussComponent>& components);

// Symmetric positive-definite covariance, row-major.
struct SmallMatrix {
  int n = 0;
  std::vector<double> a;

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Multivariate normal density; throws on a non-positive-definite covariance.
double mgd_pdf(const std::vector<double>& x, const std::vector<double>& mean,
               const SmallMatrix& cov);

// Unnormalized density table over an n-bit, possibly multi-dimensional
// domain. Dimension 0 occupies the low bits of the packed word. Above
// kMaxTableBits the density is evaluated on the fly instead of tabulated.
class TargetPdf {
 public:
  static constexpr int kMaxTableBits = 24;

  using DensityFn = std::function<double(const std::vector<double>&)>;

  static TargetPdf from_table(std::vector<double> table);
  static TargetPdf flat(int total_bits);
  static TargetPdf discretize(const DensityFn& pdf, int dims, int bits_per_dim,
                              const std::vector<std::pair<double, double>>& ranges);
  static TargetPdf gmm(std::vector<GaussComponent> components, int bits,
                       std::pair<double, double> range);
  static TargetPdf mgd(std::vector<double> mean, SmallMatrix cov, int bits_per_dim,
                       std::vector<std::pair<double, double>> ranges);

  // 4 equal components at 20/40/60/80% of [0,1], sigma 5% of range.
  static TargetPdf default_gmm(int bits);
  // Centered bivariate normal, cov [[1,.5],[.5,1]], domain [-10,10]^2.
  static TargetPdf default_mgd(int bits_per_dim);

  // {"type": "gmm"|"mgd"|"table"|"flat", params...}
  static TargetPdf from_json(const nlohmann::json& spec);
  // CSV rows: index,density
  static TargetPdf table_from_csv(const std::string& path);

  double density(std::uint64_t word) const;
  std::vector<double> grid_point(std::uint64_t word) const;

  int dims() const { return dims_; }
  int bits_per_dim() const { return bits_per_dim_; }
  int total_bits() const { return dims_ * bits_per_dim_; }
  std::uint64_t size() const { return std::uint64_t{1} << total_bits(); }
  bool tabulated() const { return !table_.empty(); }
  const std::vector<double>& table() const { return table_; }
  std::vector<double> normalized() const;

 private:
  TargetPdf() = default;

  int dims_ = 1;
  int bits_per_dim_ = 0;
  std::vector<std::pair<double, double>> ranges_;
  std::vector<double> table_;
  DensityFn fn_;
};

}  // namespace cimmc

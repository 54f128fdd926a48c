#include "cimmc/target_pdf.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace cimmc {

namespace {

// Lower-triangular Cholesky factor; nullopt if not positive definite.
std::optional<SmallMatrix> cholesky(const SmallMatrix& m) {
  SmallMatrix l{m.n, std::vector<double>(m.a.size(), 0.0)};
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (s <= 0.0) return std::nullopt;
        l.at(i, j) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return l;
}

}  // namespace

double gmm_pdf(double x, const std::vector<GaussComponent>& components) {
  if (components.empty()) throw std::invalid_argument("gmm needs at least one component");
  double d = 0.0;
  for (const auto& c : components) {
    if (c.weight <= 0.0 || c.sigma <= 0.0) {
      throw std::invalid_argument("gmm weights and sigmas must be positive");
    }
    const double z = (x - c.mean) / c.sigma;
    d += c.weight / (c.sigma * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-0.5 * z * z);
  }
  return d;
}

double mgd_pdf(const std::vector<double>& x, const std::vector<double>& mean,
               const SmallMatrix& cov) {
  const int d = cov.n;
  if (static_cast<int>(x.size()) != d || static_cast<int>(mean.size()) != d) {
    throw std::invalid_argument("dimension mismatch in mgd_pdf");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(cov.at(i, j) - cov.at(j, i)) > 1e-12 * (1.0 + std::abs(cov.at(i, j)))) {
        throw std::invalid_argument("covariance must be symmetric");
      }
    }
  }
  const auto l = cholesky(cov);
  if (!l) throw std::invalid_argument("covariance must be positive definite");
  // Solve L y = x - mean; |y|^2 is the Mahalanobis distance squared.
  std::vector<double> y(d);
  double quad = 0.0;
  double log_det_sqrt = 0.0;
  for (int i = 0; i < d; ++i) {
    double s = x[i] - mean[i];
    for (int k = 0; k < i; ++k) s -= l->at(i, k) * y[k];
    y[i] = s / l->at(i, i);
    quad += y[i] * y[i];
    log_det_sqrt += std::log(l->at(i, i));
  }
  return std::exp(-0.5 * quad - log_det_sqrt - 0.5 * d * std::log(2.0 * std::numbers::pi));
}

TargetPdf TargetPdf::from_table(std::vector<double> table) {
  if (table.empty() || (table.size() & (table.size() - 1)) != 0) {
    throw std::invalid_argument("table length must be a power of two");
  }
  int bits = 0;
  while ((std::size_t{1} << bits) < table.size()) ++bits;
  bool any_positive = false;
  for (double v : table) {
    if (std::isnan(v) || v < 0.0) throw std::invalid_argument("densities must be nonnegative");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("at least one density must be positive");
  TargetPdf t;
  t.dims_ = 1;
  t.bits_per_dim_ = bits;
  t.ranges_ = {{0.0, 1.0}};
  t.table_ = std::move(table);
  return t;
}

TargetPdf TargetPdf::flat(int total_bits) {
  if (total_bits < 1 || total_bits > kMaxTableBits) {
    throw std::invalid_argument("flat target bits out of range");
  }
  return from_table(std::vector<double>(std::size_t{1} << total_bits, 1.0));
}

TargetPdf TargetPdf::discretize(const DensityFn& pdf, int dims, int bits_per_dim,
                                const std::vector<std::pair<double, double>>& ranges) {
  if (dims < 1 || bits_per_dim < 1) throw std::invalid_argument("dims and bits_per_dim must be >= 1");
  if (static_cast<int>(ranges.size()) != dims) throw std::invalid_argument("one range per dimension required");
  for (const auto& [lo, hi] : ranges) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw std::invalid_argument("ranges must be finite with lo < hi");
    }
  }
  TargetPdf t;
  t.dims_ = dims;
  t.bits_per_dim_ = bits_per_dim;
  t.ranges_ = ranges;
  t.fn_ = pdf;
  const int total = dims * bits_per_dim;
  if (total > 63) throw std::invalid_argument("total bits exceed 63");
  if (total <= kMaxTableBits) {
    t.table_.resize(std::size_t{1} << total);
    for (std::uint64_t w = 0; w < t.table_.size(); ++w) {
      const double v = pdf(t.grid_point(w));
      if (std::isnan(v) || v < 0.0) {
        throw std::invalid_argument("pdf produced a NaN or negative density");
      }
      t.table_[w] = v;
    }
    bool any = false;
    for (double v : t.table_) any = any || v > 0.0;
    if (!any) throw std::invalid_argument("discretized table is identically zero");
  }
  return t;
}

TargetPdf TargetPdf::gmm(std::vector<GaussComponent> components, int bits,
                         std::pair<double, double> range) {
  auto fn = [components = std::move(components)](const std::vector<double>& x) {
    return gmm_pdf(x[0], components);
  };
  return discretize(fn, 1, bits, {range});
}

TargetPdf TargetPdf::mgd(std::vector<double> mean, SmallMatrix cov, int bits_per_dim,
                         std::vector<std::pair<double, double>> ranges) {
  // Validate eagerly so a bad covariance fails at construction.
  mgd_pdf(mean, mean, cov);
  auto fn = [mean = std::move(mean), cov = std::move(cov)](const std::vector<double>& x) {
    return mgd_pdf(x, mean, cov);
  };
  return discretize(fn, cov.n, bits_per_dim, std::move(ranges));
}

TargetPdf TargetPdf::default_gmm(int bits) {
  return gmm({{0.25, 0.2, 0.05}, {0.25, 0.4, 0.05}, {0.25, 0.6, 0.05}, {0.25, 0.8, 0.05}},
             bits, {0.0, 1.0});
}

TargetPdf TargetPdf::default_mgd(int bits_per_dim) {
  SmallMatrix cov{2, {1.0, 0.5, 0.5, 1.0}};
  return mgd({0.0, 0.0}, std::move(cov), bits_per_dim, {{-10.0, 10.0}, {-10.0, 10.0}});
}

TargetPdf TargetPdf::from_json(const nlohmann::json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "flat") {
    return flat(spec.value("bits", 4));
  }
  if (type == "table") {
    if (spec.contains("path")) return table_from_csv(spec.at("path").get<std::string>());
    return from_table(spec.at("values").get<std::vector<double>>());
  }
  if (type == "gmm") {
    const int bits = spec.value("bits", 8);
    std::pair<double, double> range{0.0, 1.0};
    if (spec.contains("range")) {
      range = {spec.at("range").at(0).get<double>(), spec.at("range").at(1).get<double>()};
    }
    if (!spec.contains("components")) {
      TargetPdf t = default_gmm(bits);
      return t;
    }
    std::vector<GaussComponent> comps;
    for (const auto& c : spec.at("components")) {
      comps.push_back({c.at("weight").get<double>(), c.at("mean").get<double>(),
                       c.at("sigma").get<double>()});
    }
    return gmm(std::move(comps), bits, range);
  }
  if (type == "mgd") {
    const int bits = spec.value("bits_per_dim", 8);
    if (!spec.contains("mean")) return default_mgd(bits);
    auto mean = spec.at("mean").get<std::vector<double>>();
    const int d = static_cast<int>(mean.size());
    SmallMatrix cov{d, std::vector<double>(static_cast<std::size_t>(d) * d)};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) cov.at(i, j) = spec.at("cov").at(i).at(j).get<double>();
    }
    std::vector<std::pair<double, double>> ranges;
    for (const auto& r : spec.at("ranges")) {
      ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
    }
    return mgd(std::move(mean), std::move(cov), bits, std::move(ranges));
  }
  throw std::invalid_argument("unknown target type: " + type);
}

TargetPdf TargetPdf::table_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target table: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, val;
    if (!std::getline(row, idx, ',') || !std::getline(row, val)) {
      throw std::runtime_error("malformed table row: " + line);
    }
    if (idx == "index") continue;  // header
    const std::size_t i = std::stoull(idx);
    if (values.size() <= i) values.resize(i + 1, 0.0);
    values[i] = std::stod(val);
  }
  return from_table(std::move(values));
}

double TargetPdf::density(std::uint64_t word) const {
  if (!table_.empty()) {
    if (word >= table_.size()) throw std::out_of_range("word outside target domain");
    return table_[word];
  }
  return fn_(grid_point(word));
}

std::vector<double> TargetPdf::grid_point(std::uint64_t word) const {
  std::vector<double> x(dims_);
  const std::uint64_t mask = (std::uint64_t{1} << bits_per_dim_) - 1;
  const double cells = static_cast<double>(std::uint64_t{1} << bits_per_dim_);
  for (int d = 0; d < dims_; ++d) {
    const std::uint64_t idx = (word >> (d * bits_per_dim_)) & mask;
    const auto& [lo, hi] = ranges_[d];
    x[d] = lo + (static_cast<double>(idx) + 0.5) * (hi - lo) / cells;
  }
  return x;
}

std::vector<double> TargetPdf::normalized() const {
  if (table_.empty()) throw std::logic_error("normalized() requires a tabulated target");
  double sum = 0.0;
  for (double v : table_) sum += v;
  std::vector<double> out(table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) out[i] = table_[i] / sum;
  return out;
}

}  // namespace cimmc

#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numbers>

#include "cimmc/target_pdf.hpp"

using namespace cimmc;

TEST_CASE("gmm peak height and symmetry") {
  const std::vector<GaussComponent> c{{1.0, 0.5, 0.1}};
  CHECK(gmm_pdf(0.5, c) == doctest::Approx(1.0 / (0.1 * std::sqrt(2.0 * std::numbers::pi))));
  CHECK(gmm_pdf(0.3, c) == doctest::Approx(gmm_pdf(0.7, c)).epsilon(1e-14));
  CHECK_THROWS(gmm_pdf(0.0, {}));
  CHECK_THROWS(gmm_pdf(0.0, {{1.0, 0.0, -0.1}}));
}

TEST_CASE("gmm integrates to the weight sum") {
  // Trapezoid quadrature over an interval wide enough that the tail mass
  // is below the tolerance; an independent check of the density formula.
  const std::vector<GaussComponent> c{{0.3, -1.0, 0.4}, {0.7, 2.0, 0.25}};
  const double lo = -1.0 - 10.0 * 0.4, hi = 2.0 + 10.0 * 0.25;
  const long n = 200000;
  const double h = (hi - lo) / n;
  double integral = 0.5 * (gmm_pdf(lo, c) + gmm_pdf(hi, c));
  for (long i = 1; i < n; ++i) integral += gmm_pdf(lo + i * h, c);
  integral *= h;
  CHECK(std::abs(integral - 1.0) < 1e-6);
}

TEST_CASE("mgd density at hand-computed points") {
  // cov [[1,.5],[.5,1]]: det = 0.75, inverse = (1/0.75)[[1,-.5],[-.5,1]].
  const SmallMatrix cov{2, {1.0, 0.5, 0.5, 1.0}};
  const std::vector<double> mean{0.0, 0.0};
  const double det = 0.75;
  auto expected = [&](double x, double y) {
    const double quad = (x * x - 2.0 * 0.5 * x * y + y * y) / det;
    return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
  };
  CHECK(mgd_pdf({0.0, 0.0}, mean, cov) == doctest::Approx(expected(0, 0)).epsilon(1e-12));
  CHECK(mgd_pdf({1.0, 1.0}, mean, cov) == doctest::Approx(expected(1, 1)).epsilon(1e-12));
  CHECK(mgd_pdf({1.5, -0.5}, mean, cov) == doctest::Approx(expected(1.5, -0.5)).epsilon(1e-12));
  // Exchange symmetry of this covariance.
  CHECK(mgd_pdf({0.7, -0.2}, mean, cov) ==
        doctest::Approx(mgd_pdf({-0.2, 0.7}, mean, cov)).epsilon(1e-14));
}

TEST_CASE("mgd rejects bad covariances") {
  CHECK_THROWS_AS(mgd_pdf({0, 0}, {0, 0}, SmallMatrix{2, {1, 2, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(mgd_pdf({0, 0}, {0, 0}, SmallMatrix{2, {1, 0.5, 0.4, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mgd_pdf({0}, {0, 0}, SmallMatrix{2, {1, 0, 0, 1}}), std::invalid_argument);
}

TEST_CASE("from_table validation") {
  CHECK_THROWS(TargetPdf::from_table({}));
  CHECK_THROWS(TargetPdf::from_table({1.0, 2.0, 3.0}));  // not a power of two
  CHECK_THROWS(TargetPdf::from_table({0.0, 0.0}));
  CHECK_THROWS(TargetPdf::from_table({1.0, -0.5}));
  const TargetPdf t = TargetPdf::from_table({1.0, 2.0, 3.0, 4.0});
  CHECK(t.total_bits() == 2);
  CHECK(t.density(3) == 4.0);
  CHECK_THROWS_AS(t.density(4), std::out_of_range);
}

TEST_CASE("flat target is uniform after normalization") {
  const TargetPdf t = TargetPdf::flat(4);
  const auto n = t.normalized();
  for (double v : n) CHECK(v == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("grid points are cell-centered with dim 0 in the low bits") {
  const TargetPdf t = TargetPdf::default_mgd(4);
  CHECK(t.dims() == 2);
  CHECK(t.total_bits() == 8);
  // word 0 -> first cell of both dims: -10 + 0.5 * 20/16 = -9.375
  auto p0 = t.grid_point(0);
  CHECK(p0[0] == doctest::Approx(-9.375));
  CHECK(p0[1] == doctest::Approx(-9.375));
  // word 1 increments dim 0 only
  auto p1 = t.grid_point(1);
  CHECK(p1[0] == doctest::Approx(-8.125));
  CHECK(p1[1] == doctest::Approx(-9.375));
  // word 16 increments dim 1 only
  auto p16 = t.grid_point(16);
  CHECK(p16[0] == doctest::Approx(-9.375));
  CHECK(p16[1] == doctest::Approx(-8.125));
}

TEST_CASE("discretization preserves ordering and locates the peak") {
  auto pdf = [](const std::vector<double>& x) {
    const double z = (x[0] - 0.5) / 0.2;
    return std::exp(-0.5 * z * z);
  };
  const TargetPdf t = TargetPdf::discretize(pdf, 1, 4, {{0.0, 1.0}});
  CHECK(t.tabulated());
  const auto& tab = t.table();
  // Peak at x=0.5 falls on the boundary of cells 7 and 8 (centers 0.46875
  // and 0.53125), which tie by symmetry.
  const auto it = std::max_element(tab.begin(), tab.end());
  const long argmax = it - tab.begin();
  CHECK((argmax == 7 || argmax == 8));
  CHECK(tab[7] == doctest::Approx(tab[8]).epsilon(1e-12));
  for (int i = 0; i < 7; ++i) CHECK(tab[i] < tab[i + 1]);
  for (int i = 8; i < 15; ++i) CHECK(tab[i] > tab[i + 1]);
}

TEST_CASE("default gmm has four peaks near 20/40/60/80 percent") {
  const TargetPdf t = TargetPdf::default_gmm(8);
  const auto& tab = t.table();
  // Local maxima of the tabulated density.
  std::vector<long> peaks;
  for (long i = 1; i + 1 < static_cast<long>(tab.size()); ++i) {
    if (tab[i] > tab[i - 1] && tab[i] > tab[i + 1]) peaks.push_back(i);
  }
  REQUIRE(peaks.size() == 4);
  const double expected[] = {0.2, 0.4, 0.6, 0.8};
  for (int k = 0; k < 4; ++k) {
    const double x = t.grid_point(peaks[k])[0];
    CHECK(std::abs(x - expected[k]) <= 1.0 / 256.0 + 1e-12);
  }
}

TEST_CASE("large domains skip tabulation but evaluate consistently") {
  auto pdf = [](const std::vector<double>& x) { return std::exp(-x[0] * x[0]); };
  const TargetPdf big = TargetPdf::discretize(pdf, 2, 16, {{-3, 3}, {-3, 3}});
  CHECK(big.total_bits() == 32);
  CHECK_FALSE(big.tabulated());
  const TargetPdf small = TargetPdf::discretize(pdf, 2, 8, {{-3, 3}, {-3, 3}});
  CHECK(small.tabulated());
  // Same density formula regardless of backing.
  const std::uint64_t w = (std::uint64_t{7} << 16) | 200;
  CHECK(big.density(w) == doctest::Approx(pdf(big.grid_point(w))).epsilon(1e-15));
}

TEST_CASE("from_json round trips every target type") {
  const TargetPdf flat = TargetPdf::from_json({{"type", "flat"}, {"bits", 4}});
  CHECK(flat.total_bits() == 4);

  const TargetPdf table = TargetPdf::from_json({{"type", "table"}, {"values", {1.0, 2.0}}});
  CHECK(table.density(1) == 2.0);

  nlohmann::json gmm_spec = {
      {"type", "gmm"},
      {"bits", 8},
      {"components", {{{"weight", 1.0}, {"mean", 0.5}, {"sigma", 0.1}}}}};
  const TargetPdf g = TargetPdf::from_json(gmm_spec);
  CHECK(g.total_bits() == 8);

  nlohmann::json mgd_spec = {{"type", "mgd"},
                             {"mean", {0.0, 0.0}},
                             {"cov", {{1.0, 0.5}, {0.5, 1.0}}},
                             {"bits_per_dim", 4},
                             {"ranges", {{-10.0, 10.0}, {-10.0, 10.0}}}};
  const TargetPdf m = TargetPdf::from_json(mgd_spec);
  CHECK(m.total_bits() == 8);
  CHECK(m.density(0) == doctest::Approx(TargetPdf::default_mgd(4).density(0)).epsilon(1e-12));

  CHECK_THROWS(TargetPdf::from_json({{"type", "nope"}}));
}

TEST_CASE("default gmm mass is concentrated around the four modes") {
  const TargetPdf t = TargetPdf::default_gmm(8);
  const auto n = t.normalized();
  double near = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = t.grid_point(i)[0];
    for (double mu : {0.2, 0.4, 0.6, 0.8}) {
      if (std::abs(x - mu) < 3.0 * 0.05) {
        near += n[i];
        break;
      }
    }
  }
  CHECK(near > 0.99);
}

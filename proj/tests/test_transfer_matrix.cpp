#include <cmath>
#include <doctest.h>

#include "cimmc/mh_sampler.hpp"
#include "cimmc/stats.hpp"

using namespace cimmc;

TEST_CASE("p=0 gives the identity matrix") {
  const TransferMatrix m = TransferMatrix::build(4, 0.0);
  for (std::uint64_t i = 0; i < 16; ++i) {
    for (std::uint64_t j = 0; j < 16; ++j) {
      CHECK(m.at(i, j) == (i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("diagonal entry at p=0.45 is 0.55^4") {
  CHECK(transfer_prob(0, 0, 0.45, 4) == doctest::Approx(std::pow(0.55, 4)));
  CHECK(transfer_prob(0b1111, 0, 0.45, 4) == doctest::Approx(std::pow(0.45, 4)));
}

TEST_CASE("symmetry for all 256 pairs at n=4") {
  const TransferMatrix m = TransferMatrix::build(4, 0.45);
  for (std::uint64_t i = 0; i < 16; ++i) {
    for (std::uint64_t j = 0; j < 16; ++j) {
      CHECK(m.at(i, j) == doctest::Approx(m.at(j, i)).epsilon(1e-15));
    }
  }
}

TEST_CASE("rows sum to one within 1e-12") {
  for (double p : {0.1, 0.4, 0.45, 0.5}) {
    const TransferMatrix m = TransferMatrix::build(4, p);
    for (std::uint64_t i = 0; i < 16; ++i) {
      double s = 0.0;
      for (std::uint64_t j = 0; j < 16; ++j) s += m.at(i, j);
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Monte-Carlo frequency of pseudo_read matches the analytic row") {
  const FlipModel flip = FlipModel::defaults();
  MacroArray array(1, 4, 16, &flip);
  RandomStream rng(123);
  const long trials = 200000;
  const auto freq = empirical_transfer_row(array, 0, 4, 0.5, 27.0, trials, rng);
  const TransferMatrix m = TransferMatrix::build(4, 0.45);
  Histogram h;
  h.bins.assign(16, 0);
  for (std::size_t j = 0; j < 16; ++j) {
    h.bins[j] = static_cast<long long>(std::llround(freq[j] * trials));
    h.total += h.bins[j];
  }
  std::vector<double> row(16);
  for (std::uint64_t j = 0; j < 16; ++j) row[j] = m.at(0, j);
  const GofResult gof = chi_square_gof(h, row);
  CHECK(gof.p_value > 0.01);
  CHECK(transfer_prob(0, 0, 0.45, 4) == doctest::Approx(freq[0]).epsilon(0.05));
}

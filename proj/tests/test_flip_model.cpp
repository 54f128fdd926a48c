#include <cmath>
#include <doctest.h>
#include <stdexcept>

#include "cimmc/flip_model.hpp"

using namespace cimmc;

TEST_CASE("bfr_at hits the published anchors") {
  const FlipModel m = FlipModel::defaults();
  CHECK(m.bfr_at(0.5, 27.0) == doctest::Approx(0.45));
  CHECK(m.bfr_at(0.6, 27.0) == doctest::Approx(0.40));
  CHECK(m.bfr_at(0.55, 27.0) == doctest::Approx(0.425));  // midpoint by hand
  CHECK(m.bfr_at(0.8, 27.0) == doctest::Approx(0.0));
}

TEST_CASE("bfr_at clamps outside the anchor span") {
  const FlipModel m = FlipModel::defaults();
  CHECK(m.bfr_at(0.3, 27.0) == doctest::Approx(0.45));
  CHECK(m.bfr_at(1.2, 27.0) == doctest::Approx(0.0));
}

TEST_CASE("temperature curve: flat above -20C, reduced at -40C") {
  const FlipModel m = FlipModel::defaults();
  CHECK(m.bfr_at(0.5, -20.0) == doctest::Approx(0.45));
  CHECK(m.bfr_at(0.5, 85.0) == doctest::Approx(0.45));
  CHECK(m.bfr_at(0.5, -40.0) == doctest::Approx(0.40));
  CHECK(m.bfr_at(0.5, -30.0) == doctest::Approx(0.425));
}

TEST_CASE("invalid models are rejected at construction") {
  CHECK_THROWS_AS(FlipModel({{0.6, 0.4}, {0.5, 0.45}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FlipModel({{0.5, 1.2}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FlipModel({{0.5, 0.4}, {0.6, 0.45}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FlipModel({}, {}), std::invalid_argument);
}

TEST_CASE("bfr_at is non-increasing in cvdd") {
  const FlipModel m = FlipModel::defaults();
  double prev = 1.0;
  for (double v = 0.45; v <= 0.85; v += 0.005) {
    const double p = m.bfr_at(v, 27.0);
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("flip_bit degenerate probabilities") {
  RandomStream rng(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(flip_bit(0, 0.0, rng) == 0);
    CHECK(flip_bit(1, 1.0, rng) == 0);
    CHECK(flip_bit(0, 1.0, rng) == 1);
  }
}

TEST_CASE("flip_bit empirical frequency within 3 sigma at each anchor") {
  const long n = 1000000;
  for (double p : {0.40, 0.45, 0.5}) {
    RandomStream rng(42);
    long ones = 0;
    for (long i = 0; i < n; ++i) ones += flip_bit(0, p, rng);
    const double freq = static_cast<double>(ones) / n;
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(freq - p) < bound);
  }
}

TEST_CASE("flip sequences are bit-exactly reproducible for a fixed seed") {
  RandomStream a = RandomStream::derive(99, 3);
  RandomStream b = RandomStream::derive(99, 3);
  for (int i = 0; i < 1000; ++i) CHECK(flip_bit(i & 1, 0.45, a) == flip_bit(i & 1, 0.45, b));
}

TEST_CASE("asymmetric overrides feed flip_prob") {
  FlipModel m({{0.5, 0.45}}, {}, 0.3, 0.2);
  CHECK(m.flip_prob(0, 0.5, 27.0) == doctest::Approx(0.3));
  CHECK(m.flip_prob(1, 0.5, 27.0) == doctest::Approx(0.2));
  CHECK_FALSE(m.symmetric());
  CHECK(FlipModel::defaults().symmetric());
}

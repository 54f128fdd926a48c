#pragma once

#include <cstdint>
#include <random>

namespace cimmc {

// Seeded deterministic randomness source. Every consumer owns its own
// stream; substreams are derived with a splitmix64 hash so that per-chain
// streams do not overlap and results are independent of scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static RandomStream derive(std::uint64_t seed, std::uint64_t stream_id) {
    return RandomStream(mix(mix(seed) ^ mix(stream_id + 0x1234567ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cimmc

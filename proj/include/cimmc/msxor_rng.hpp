#pragma once

#include <array>
#include <cstdint>

#include "cimmc/perf.hpp"
#include "cimmc/random_stream.hpp"

namespace cimmc {

// n-fold application of the XOR bias map l -> 2 l (1 - l).
double lambda_after(double lambda0, long stages);

// out[i] = in[2i] XOR in[2i+1]; width must be even.
std::uint64_t xor_reduce(std::uint64_t bits, int width);

// Accurate [0,1] RNG: 64 raw bitcells, reset + pseudo-read, then a
// multi-stage XOR cascade down to 64 / 2^stages output bits.
class MsxorRng {
 public:
  explicit MsxorRng(RandomStream stream, int stages = 3, PerfLedger* ledger = nullptr);

  int stages() const { return stages_; }
  int output_bits() const { return 64 >> stages_; }

  // Resets the raw cells to zero, then flips each with probability p.
  std::uint64_t raw_bits(double p);

  // Full cascade; an 8-bit value at the default 3 stages. u = value / 256.
  unsigned next_u8(double p);

  // p = 0 produces constant zeros; p > 0.5 still converges to 0.5 but is
  // outside the bias guarantee. Both are flagged rather than rejected.
  bool degenerate_seen() const { return degenerate_seen_; }
  bool biased_input_seen() const { return biased_input_seen_; }

  void set_energy_constants(const EnergyConstants& e) { energy_ = e; }

 private:
  EnergyConstants energy_;
  RandomStream stream_;
  int stages_;
  PerfLedger* ledger_;
  std::array<std::uint8_t, 64> cells_{};
  bool degenerate_seen_ = false;
  bool biased_input_seen_ = false;
};

}  // namespace cimmc

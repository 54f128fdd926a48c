#include "cimmc/msxor_rng.hpp"

#include <iostream>
#include <stdexcept>

#include "cimmc/flip_model.hpp"

namespace cimmc {

double lambda_after(double lambda0, long stages) {
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) {
    throw std::invalid_argument("lambda0 must be in [0,1]");
  }
  if (stages < 0) throw std::invalid_argument("stage count must be >= 0");
  double l = lambda0;
  for (long i = 0; i < stages; ++i) l = 2.0 * l * (1.0 - l);
  return l;
}

std::uint64_t xor_reduce(std::uint64_t bits, int width) {
  if (width <= 0 || width % 2 != 0 || width > 64) {
    throw std::invalid_argument("xor_reduce needs an even width in (0, 64]");
  }
  std::uint64_t out = 0;
  for (int i = 0; i < width / 2; ++i) {
    const std::uint64_t a = (bits >> (2 * i)) & 1u;
    const std::uint64_t b = (bits >> (2 * i + 1)) & 1u;
    out |= (a ^ b) << i;
  }
  return out;
}

MsxorRng::MsxorRng(RandomStream stream, int stages, PerfLedger* ledger)
    : stream_(stream), stages_(stages), ledger_(ledger) {
  if (stages < 1 || 64 % (1 << stages) != 0) {
    throw std::invalid_argument("stages must be >= 1 with 64 divisible by 2^stages");
  }
}

std::uint64_t MsxorRng::raw_bits(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  if (p == 0.0 && !degenerate_seen_) {
    degenerate_seen_ = true;
    std::cerr << "cimmc: uRNG flip probability is 0, output is constant zero\n";
  }
  if (p > 0.5 && !biased_input_seen_) {
    biased_input_seen_ = true;
    std::cerr << "cimmc: uRNG flip probability " << p
              << " exceeds 0.5; bias bound assumes lambda0 <= 0.5\n";
  }
  // Reset then pseudo-read, so every raw bit is Bernoulli(p) exactly.
  cells_.fill(0);
  std::uint64_t bits = 0;
  for (int i = 0; i < 64; ++i) {
    cells_[i] = static_cast<std::uint8_t>(flip_bit(0, p, stream_));
    bits |= static_cast<std::uint64_t>(cells_[i]) << i;
  }
  return bits;
}

unsigned MsxorRng::next_u8(double p) {
  std::uint64_t bits = raw_bits(p);
  int width = 64;
  for (int s = 0; s < stages_; ++s) {
    bits = xor_reduce(bits, width);
    width /= 2;
  }
  if (ledger_) ledger_->log(OpKind::Urng, width, -1, energy_.e_urng_fj, 0.0);
  return static_cast<unsigned>(bits);
}

}  // namespace cimmc

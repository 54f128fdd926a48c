#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cimmc/flip_model.hpp"
#include "cimmc/macro_array.hpp"
#include "cimmc/perf.hpp"
#include "cimmc/target_pdf.hpp"

namespace cimmc {

// Proposal probability q(x -> y) = p^H (1-p)^(n-H), H = Hamming distance.
double transfer_prob(std::uint64_t x, std::uint64_t y, double p, int n_bits);

// Dense 2^n x 2^n proposal matrix; n_bits <= 12.
struct TransferMatrix {
  int n_bits;
  double p;
  std::vector<double> entries;

  static TransferMatrix build(int n_bits, double p);
  double at(std::uint64_t i, std::uint64_t j) const {
    return entries[(i << n_bits) + j];
  }
  std::uint64_t dim() const { return std::uint64_t{1} << n_bits; }
};

// Integerized accept test: u8 * p_cur < 256 * p_cand, the exact form of
// u < p(x*) / p(x) with u = u8/256. A zero current density always accepts;
// both densities zero means the target table is invalid at visited states.
bool accept_check(double p_cur, double p_cand, unsigned u8);

struct RunConfig {
  int n_bits = 4;
  long iterations = 10000;
  long burn_in = 1000;
  long thin = 1;
  int compartments = 64;
  std::uint64_t seed = 1;
  double cvdd = 0.5;
  double temperature = 27.0;
  bool shared_u = true;
  int workers = 1;
  // Cyclic row-local storage window (the default) keeps every inter-word
  // transfer an in-memory copy; the strict mode walks the whole compartment
  // once and stops with a partial flag when the window is exhausted.
  bool wrap_window = true;
  std::optional<std::uint64_t> init_value;
  bool record_details = false;
  FlipModel flip = FlipModel::defaults();
  EnergyConstants energy;
  TimingConstants timing;
  const TargetPdf* target = nullptr;
};

void validate(const RunConfig& config);

struct ChainState {
  int compartment = 0;
  int word_slots = 0;       // word positions per row
  int slot = 0;             // current word position
  int row = 0;
  std::uint64_t current_word = 0;
  long iteration = 0;
  long accepted_count = 0;
  bool exhausted = false;
};

struct StepOutcome {
  bool accepted;
  std::uint64_t sample;     // x^(i+1)
  std::uint64_t candidate;  // x*
};

// One MH iteration against the array: copy to the next address, propose by
// pseudo-read, read back, check against the shared u value, and restore the
// previous word with an extra copy on rejection.
StepOutcome step(ChainState& chain, MacroArray& array, unsigned u8, const TargetPdf& target,
                 const RunConfig& config, RandomStream& rng);

struct StepRecord {
  int compartment;
  long iteration;
  std::uint64_t candidate;
  bool accepted;
  std::uint64_t value;
  unsigned u8;
};

struct SampleSet {
  std::vector<std::vector<std::uint64_t>> samples;  // per compartment, post burn-in
  std::vector<long> accepted_per_compartment;
  long iterations = 0;
  long burn_in = 0;
  double acceptance_rate = 0.0;
  bool partial = false;
  double hardware_time_ns = 0.0;
  PerfLedger ledger;
  std::vector<StepRecord> details;

  std::vector<std::uint64_t> pooled() const;
  long total_samples() const;
};

// Full hardware-model run: deterministic for a fixed seed, independent of
// the worker count.
SampleSet run(const RunConfig& config);

// Floating-point software MH sampler with the same proposal law and a
// real-valued u; the cross-validation oracle for the hardware model.
SampleSet run_reference(const RunConfig& config);

}  // namespace cimmc

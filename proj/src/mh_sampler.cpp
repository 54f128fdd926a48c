#include "cimmc/mh_sampler.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cimmc/msxor_rng.hpp"

namespace cimmc {

namespace {
constexpr std::uint64_t kUrngStreamId = 0x0752c6;    // shared u generator
constexpr std::uint64_t kChainStreamBase = 0x10000;  // + compartment
constexpr std::uint64_t kInitStreamBase = 0x20000;   // + compartment
}  // namespace

double transfer_prob(std::uint64_t x, std::uint64_t y, double p, int n_bits) {
  if (n_bits < 1 || n_bits > 63) throw std::invalid_argument("n_bits out of range");
  const std::uint64_t lim = std::uint64_t{1} << n_bits;
  if (x >= lim || y >= lim) throw std::invalid_argument("word exceeds n_bits");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  const int h = std::popcount(x ^ y);
  return std::pow(p, h) * std::pow(1.0 - p, n_bits - h);
}

TransferMatrix TransferMatrix::build(int n_bits, double p) {
  if (n_bits < 1 || n_bits > 12) throw std::invalid_argument("dense transfer matrix limited to 12 bits");
  TransferMatrix m{n_bits, p, {}};
  const std::uint64_t dim = m.dim();
  m.entries.resize(dim * dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      m.entries[(i << n_bits) + j] = transfer_prob(i, j, p, n_bits);
    }
  }
  return m;
}

bool accept_check(double p_cur, double p_cand, unsigned u8) {
  if (u8 > 255) throw std::invalid_argument("u8 must be in [0,255]");
  if (p_cur < 0.0 || p_cand < 0.0) throw std::invalid_argument("densities must be nonnegative");
  if (p_cur == 0.0 && p_cand == 0.0) {
    throw std::domain_error("target density is zero at both states");
  }
  if (p_cur == 0.0) return true;
  return static_cast<double>(u8) * p_cur < 256.0 * p_cand;
}

void validate(const RunConfig& config) {
  if (config.n_bits < 4 || config.n_bits > 64 || config.n_bits % 4 != 0) {
    throw std::invalid_argument("n_bits must be a multiple of 4 in [4, 64]");
  }
  if (config.iterations <= 0) throw std::invalid_argument("iterations must be positive");
  if (config.burn_in < 0 || config.burn_in >= config.iterations) {
    throw std::invalid_argument("burn_in must be in [0, iterations)");
  }
  if (config.thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (config.compartments < 1) throw std::invalid_argument("compartments must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (config.target == nullptr) throw std::invalid_argument("target distribution required");
  if (config.target->total_bits() != config.n_bits) {
    throw std::invalid_argument("target domain does not match n_bits");
  }
  if (config.init_value && config.n_bits < 64 &&
      *config.init_value >= (std::uint64_t{1} << config.n_bits)) {
    throw std::invalid_argument("init_value exceeds n_bits");
  }
}

namespace {

GroupAddr slot_addr(const ChainState& chain, int slot, int groups_per_word) {
  return GroupAddr{0, chain.row, slot * groups_per_word};
}

// Moves a word between slots: an in-memory copy when row-local, otherwise
// an explicit read+write through the R/W circuits.
void transfer_word(MacroArray& array, const GroupAddr& src, const GroupAddr& dst, int n_bits) {
  if (src.row == dst.row && src.compartment == dst.compartment) {
    array.copy_word(src, dst, n_bits);
  } else {
    const std::uint64_t w = array.read(src, n_bits);
    array.write(dst, w, n_bits);
  }
}

}  // namespace

StepOutcome step(ChainState& chain, MacroArray& array, unsigned u8, const TargetPdf& target,
                 const RunConfig& config, RandomStream& rng) {
  if (chain.exhausted) throw std::logic_error("chain storage window exhausted");
  const int k = config.n_bits / MacroArray::kGroupWidth;

  int next_slot = chain.slot + 1;
  int next_row = chain.row;
  if (next_slot >= chain.word_slots) {
    next_slot = 0;
    if (config.wrap_window) {
      // Cyclic window within the row; every transfer stays an in-memory copy.
      if (chain.word_slots < 2) next_row = chain.row + 1;  // 64-bit words: one per row
    } else {
      next_row = chain.row + 1;
    }
    if (next_row >= array.rows()) {
      if (config.wrap_window) {
        next_row = 0;
      } else {
        chain.exhausted = true;
        return {false, chain.current_word, chain.current_word};
      }
    }
  }

  const GroupAddr cur = slot_addr(chain, chain.slot, k);
  GroupAddr next{0, next_row, next_slot * k};

  transfer_word(array, cur, next, config.n_bits);
  const std::uint64_t candidate =
      array.pseudo_read(next, config.n_bits, config.cvdd, config.temperature, rng);
  const std::uint64_t readback = array.read(next, config.n_bits);

  const bool accepted =
      accept_check(target.density(chain.current_word), target.density(readback), u8);
  if (array.ledger()) {
    array.ledger()->log(OpKind::Calc, config.n_bits, chain.compartment,
                        array.energy_constants().e_calc_fj, 0.0);
  }
  if (!accepted) {
    // Overwrite the rejected candidate with the previous value.
    transfer_word(array, cur, next, config.n_bits);
  }

  chain.slot = next_slot;
  chain.row = next_row;
  chain.current_word = accepted ? candidate : chain.current_word;
  chain.iteration += 1;
  chain.accepted_count += accepted ? 1 : 0;
  return {accepted, chain.current_word, candidate};
}

namespace {

struct CompartmentResult {
  std::vector<std::uint64_t> samples;
  long accepted = 0;
  long steps = 0;
  bool partial = false;
  PerfLedger ledger;
  std::vector<StepRecord> details;
};

CompartmentResult run_compartment(const RunConfig& config, int compartment,
                                  const std::vector<unsigned>& us) {
  CompartmentResult result;
  result.ledger.enable_trace(false);
  MacroArray array(1, 64, 64, &config.flip, &result.ledger);
  array.set_energy_constants(config.energy);
  array.set_timing_constants(config.timing);

  const int k = config.n_bits / MacroArray::kGroupWidth;
  ChainState chain;
  chain.compartment = compartment;
  chain.word_slots = array.groups_per_row() / k;

  RandomStream rng = RandomStream::derive(config.seed, kChainStreamBase + compartment);
  const GroupAddr origin{0, 0, 0};
  array.reset_zero(origin, config.n_bits);
  if (config.init_value) {
    array.write(origin, *config.init_value, config.n_bits);
    chain.current_word = *config.init_value;
  } else {
    RandomStream init = RandomStream::derive(config.seed, kInitStreamBase + compartment);
    chain.current_word =
        array.pseudo_read(origin, config.n_bits, config.cvdd, config.temperature, init);
  }

  result.samples.reserve((config.iterations - config.burn_in + config.thin - 1) / config.thin);
  for (long i = 0; i < config.iterations; ++i) {
    const StepOutcome out = step(chain, array, us[i], *config.target, config, rng);
    if (chain.exhausted) {
      result.partial = true;
      break;
    }
    result.steps += 1;
    if (i >= config.burn_in && (i - config.burn_in) % config.thin == 0) {
      result.samples.push_back(out.sample);
    }
    if (config.record_details) {
      result.details.push_back({compartment, i, out.candidate, out.accepted, out.sample, us[i]});
    }
  }
  result.accepted = chain.accepted_count;
  return result;
}

}  // namespace

std::vector<std::uint64_t> SampleSet::pooled() const {
  std::vector<std::uint64_t> all;
  for (const auto& s : samples) all.insert(all.end(), s.begin(), s.end());
  return all;
}

long SampleSet::total_samples() const {
  long n = 0;
  for (const auto& s : samples) n += static_cast<long>(s.size());
  return n;
}

SampleSet run(const RunConfig& config) {
  validate(config);
  SampleSet out;
  out.iterations = config.iterations;
  out.burn_in = config.burn_in;

  // The per-iteration u values are drawn up front so compartment workers
  // can proceed independently; one value per iteration is shared across
  // all compartments unless per-compartment u is requested.
  PerfLedger urng_ledger;
  std::vector<std::vector<unsigned>> us;
  if (config.shared_u) {
    MsxorRng urng(RandomStream::derive(config.seed, kUrngStreamId), 3, &urng_ledger);
    urng.set_energy_constants(config.energy);
    const double p = config.flip.bfr_at(config.cvdd, config.temperature);
    us.emplace_back();
    us[0].reserve(config.iterations);
    for (long i = 0; i < config.iterations; ++i) us[0].push_back(urng.next_u8(p));
  } else {
    us.resize(config.compartments);
    const double p = config.flip.bfr_at(config.cvdd, config.temperature);
    for (int c = 0; c < config.compartments; ++c) {
      MsxorRng urng(RandomStream::derive(config.seed, kUrngStreamId + 1 + c), 3, &urng_ledger);
      urng.set_energy_constants(config.energy);
      us[c].reserve(config.iterations);
      for (long i = 0; i < config.iterations; ++i) us[c].push_back(urng.next_u8(p));
    }
  }

  std::vector<CompartmentResult> results(config.compartments);
  const int workers = std::min<int>(config.workers, config.compartments);
  if (workers <= 1) {
    for (int c = 0; c < config.compartments; ++c) {
      results[c] = run_compartment(config, c, us[config.shared_u ? 0 : c]);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int c = w; c < config.compartments; c += workers) {
          results[c] = run_compartment(config, c, us[config.shared_u ? 0 : c]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Deterministic merge in compartment order.
  out.ledger.merge(urng_ledger);
  long accepted = 0;
  long steps = 0;
  for (int c = 0; c < config.compartments; ++c) {
    auto& r = results[c];
    out.samples.push_back(std::move(r.samples));
    out.accepted_per_compartment.push_back(r.accepted);
    out.partial = out.partial || r.partial;
    accepted += r.accepted;
    steps += r.steps;
    out.ledger.merge(r.ledger);
    if (config.record_details) {
      out.details.insert(out.details.end(), r.details.begin(), r.details.end());
    }
  }
  out.acceptance_rate = steps > 0 ? static_cast<double>(accepted) / steps : 0.0;
  out.hardware_time_ns =
      config.iterations *
      (config.timing.t_base_ns + (config.n_bits / 4) * config.timing.t_step_ns);
  return out;
}

}  // namespace cimmc

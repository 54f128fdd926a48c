#include <stdexcept>
#include <thread>
#include <vector>

#include "cimmc/mh_sampler.hpp"

namespace cimmc {

namespace {
constexpr std::uint64_t kRefUStreamId = 0x5e1f;
constexpr std::uint64_t kRefChainBase = 0x30000;
constexpr std::uint64_t kRefInitBase = 0x40000;

struct RefResult {
  std::vector<std::uint64_t> samples;
  long accepted = 0;
  std::vector<StepRecord> details;
};

RefResult run_ref_compartment(const RunConfig& config, int compartment,
                              const std::vector<double>& us) {
  RefResult result;
  const double p = config.flip.bfr_at(config.cvdd, config.temperature);
  RandomStream rng = RandomStream::derive(config.seed, kRefChainBase + compartment);

  std::uint64_t x;
  if (config.init_value) {
    x = *config.init_value;
  } else {
    RandomStream init = RandomStream::derive(config.seed, kRefInitBase + compartment);
    x = 0;
    for (int b = 0; b < config.n_bits; ++b) {
      x |= static_cast<std::uint64_t>(flip_bit(0, p, init)) << b;
    }
  }

  result.samples.reserve((config.iterations - config.burn_in + config.thin - 1) / config.thin);
  for (long i = 0; i < config.iterations; ++i) {
    std::uint64_t cand = x;
    for (int b = 0; b < config.n_bits; ++b) {
      if (rng.bernoulli(p)) cand ^= std::uint64_t{1} << b;
    }
    const double p_cur = config.target->density(x);
    const double p_cand = config.target->density(cand);
    if (p_cur == 0.0 && p_cand == 0.0) {
      throw std::domain_error("target density is zero at both states");
    }
    const double u = us[i];
    const bool accepted = p_cur == 0.0 || u * p_cur < p_cand;
    if (accepted) x = cand;
    result.accepted += accepted ? 1 : 0;
    if (i >= config.burn_in && (i - config.burn_in) % config.thin == 0) {
      result.samples.push_back(x);
    }
    if (config.record_details) {
      result.details.push_back({compartment, i, cand, accepted, x,
                                static_cast<unsigned>(u * 256.0)});
    }
  }
  return result;
}

}  // namespace

SampleSet run_reference(const RunConfig& config) {
  validate(config);
  SampleSet out;
  out.iterations = config.iterations;
  out.burn_in = config.burn_in;

  std::vector<std::vector<double>> us;
  if (config.shared_u) {
    RandomStream u_stream = RandomStream::derive(config.seed, kRefUStreamId);
    us.emplace_back();
    us[0].reserve(config.iterations);
    for (long i = 0; i < config.iterations; ++i) us[0].push_back(u_stream.next_unit());
  } else {
    us.resize(config.compartments);
    for (int c = 0; c < config.compartments; ++c) {
      RandomStream u_stream = RandomStream::derive(config.seed, kRefUStreamId + 1 + c);
      us[c].reserve(config.iterations);
      for (long i = 0; i < config.iterations; ++i) us[c].push_back(u_stream.next_unit());
    }
  }

  std::vector<RefResult> results(config.compartments);
  const int workers = std::min<int>(config.workers, config.compartments);
  if (workers <= 1) {
    for (int c = 0; c < config.compartments; ++c) {
      results[c] = run_ref_compartment(config, c, us[config.shared_u ? 0 : c]);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int c = w; c < config.compartments; c += workers) {
          results[c] = run_ref_compartment(config, c, us[config.shared_u ? 0 : c]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  long accepted = 0;
  for (int c = 0; c < config.compartments; ++c) {
    auto& r = results[c];
    out.samples.push_back(std::move(r.samples));
    out.accepted_per_compartment.push_back(r.accepted);
    accepted += r.accepted;
    if (config.record_details) {
      out.details.insert(out.details.end(), r.details.begin(), r.details.end());
    }
  }
  out.acceptance_rate =
      static_cast<double>(accepted) / (static_cast<double>(config.iterations) * config.compartments);
  return out;
}

}  // namespace cimmc

#include "cimmc/perf.hpp"

#include <stdexcept>

namespace cimmc {

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::Write: return "write";
    case OpKind::Read: return "read";
    case OpKind::PseudoRead: return "random";
    case OpKind::Copy: return "copy";
    case OpKind::Reset: return "reset";
    case OpKind::Urng: return "urng";
    case OpKind::Calc: return "calc";
    default: return "?";
  }
}

void PerfLedger::log(OpKind op, int bits, int compartment, double energy_fj, double time_ns) {
  const int i = static_cast<int>(op);
  energy_[i] += energy_fj;
  time_[i] += time_ns;
  counts_[i] += 1;
  if (trace_enabled_) events_.push_back({op, bits, compartment, energy_fj, time_ns});
}

void PerfLedger::merge(const PerfLedger& other) {
  for (int i = 0; i < kOps; ++i) {
    energy_[i] += other.energy_[i];
    time_[i] += other.time_[i];
    counts_[i] += other.counts_[i];
  }
  if (trace_enabled_) {
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
  }
}

double PerfLedger::total_energy_fj() const {
  double s = 0.0;
  for (double e : energy_) s += e;
  return s;
}

double PerfLedger::total_time_ns() const {
  double s = 0.0;
  for (double t : time_) s += t;
  return s;
}

long long PerfLedger::total_count() const {
  long long s = 0;
  for (long long c : counts_) s += c;
  return s;
}

double energy_per_sample_pj(const EnergyConstants& c, int n_bits, bool accepted) {
  if (n_bits <= 0 || n_bits % 4 != 0) throw std::invalid_argument("n_bits must be a positive multiple of 4");
  const double k = n_bits / 4;
  double fj = (c.e_random_fj + c.e_copy_fj + c.e_read_fj) * k +
              c.e_urng_fj / c.urng_share + c.e_calc_fj;
  if (!accepted) fj += c.e_copy_fj * k;
  return fj * 1e-3;
}

double blended_energy_pj(const EnergyConstants& c, int n_bits, double acceptance_rate) {
  if (!(acceptance_rate >= 0.0 && acceptance_rate <= 1.0)) {
    throw std::invalid_argument("acceptance rate must be in [0,1]");
  }
  return acceptance_rate * energy_per_sample_pj(c, n_bits, true) +
         (1.0 - acceptance_rate) * energy_per_sample_pj(c, n_bits, false);
}

double throughput_samples_per_s(const TimingConstants& t, int n_bits, int compartments) {
  if (n_bits <= 0 || n_bits % 4 != 0) throw std::invalid_argument("n_bits must be a positive multiple of 4");
  if (compartments <= 0) throw std::invalid_argument("compartments must be positive");
  const double period_ns = t.t_base_ns + (n_bits / 4) * t.t_step_ns;
  return compartments / (period_ns * 1e-9);
}

AreaReport area_report() { return AreaReport{}; }

}  // namespace cimmc

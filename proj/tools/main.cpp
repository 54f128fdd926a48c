#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cimmc/mh_sampler.hpp"
#include "cimmc/msxor_rng.hpp"
#include "cimmc/stats.hpp"

using json = nlohmann::json;
using namespace cimmc;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything the subcommands need, assembled from the JSON config file
// first and then overridden by any explicitly given CLI flags.
struct Experiment {
  RunConfig run;
  TargetPdf target = TargetPdf::flat(4);
  json target_spec;
  std::string out_dir = ".";
  long rng_draws = 1000000;
  long matrix_trials = 0;
  std::string sweep_param = "temp";
  double sweep_from = -40.0;
  double sweep_to = 85.0;
  double sweep_step = 5.0;
};

struct Flags {
  std::string config_path;
  std::string target_json;
  std::string out_dir;
  std::string sweep_param;
  std::optional<std::uint64_t> seed;
  std::optional<int> bits;
  std::optional<long> iterations;
  std::optional<long> burn_in;
  std::optional<long> thin;
  std::optional<int> compartments;
  std::optional<int> workers;
  std::optional<double> cvdd;
  std::optional<double> temp;
  std::optional<long> draws;
  std::optional<long> trials;
  std::optional<double> sweep_from;
  std::optional<double> sweep_to;
  std::optional<double> sweep_step;
};

FlipModel flip_from_json(const json& spec) {
  FlipModel::Curve anchors, temp_scale;
  for (const auto& a : spec.at("anchors")) {
    anchors.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  }
  if (spec.contains("temp_scale")) {
    for (const auto& t : spec.at("temp_scale")) {
      temp_scale.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    }
  }
  std::optional<double> f01, f10;
  if (spec.contains("flip01")) f01 = spec.at("flip01").get<double>();
  if (spec.contains("flip10")) f10 = spec.at("flip10").get<double>();
  return FlipModel(std::move(anchors), std::move(temp_scale), f01, f10);
}

// Precedence: built-in defaults < JSON config file < CLI flags.
Experiment assemble(const Flags& flags) {
  Experiment ex;
  json cfg = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw ConfigError("cannot open config file: " + flags.config_path);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }

  try {
    ex.run.seed = cfg.value("seed", ex.run.seed);
    ex.run.n_bits = cfg.value("bits", ex.run.n_bits);
    ex.run.iterations = cfg.value("iterations", ex.run.iterations);
    ex.run.burn_in = cfg.value("burn_in", ex.run.burn_in);
    ex.run.thin = cfg.value("thin", ex.run.thin);
    ex.run.compartments = cfg.value("compartments", ex.run.compartments);
    ex.run.workers = cfg.value("workers", ex.run.workers);
    ex.run.cvdd = cfg.value("cvdd", ex.run.cvdd);
    ex.run.temperature = cfg.value("temperature", ex.run.temperature);
    ex.run.shared_u = cfg.value("shared_u", ex.run.shared_u);
    ex.run.wrap_window = cfg.value("wrap_window", ex.run.wrap_window);
    if (cfg.contains("init_value")) ex.run.init_value = cfg.at("init_value").get<std::uint64_t>();
    if (cfg.contains("flip")) ex.run.flip = flip_from_json(cfg.at("flip"));
    if (cfg.contains("energy")) {
      const json& e = cfg.at("energy");
      ex.run.energy.e_random_fj = e.value("random_fj", ex.run.energy.e_random_fj);
      ex.run.energy.e_copy_fj = e.value("copy_fj", ex.run.energy.e_copy_fj);
      ex.run.energy.e_read_fj = e.value("read_fj", ex.run.energy.e_read_fj);
      ex.run.energy.e_write_fj = e.value("write_fj", ex.run.energy.e_write_fj);
      ex.run.energy.e_urng_fj = e.value("urng_fj", ex.run.energy.e_urng_fj);
      ex.run.energy.e_calc_fj = e.value("calc_fj", ex.run.energy.e_calc_fj);
      ex.run.energy.urng_share = e.value("urng_share", ex.run.energy.urng_share);
    }
    if (cfg.contains("timing")) {
      const json& t = cfg.at("timing");
      ex.run.timing.t_base_ns = t.value("base_ns", ex.run.timing.t_base_ns);
      ex.run.timing.t_step_ns = t.value("step_ns", ex.run.timing.t_step_ns);
    }
    ex.out_dir = cfg.value("out", ex.out_dir);
    if (cfg.contains("target")) ex.target_spec = cfg.at("target");
    if (cfg.contains("rng_test")) ex.rng_draws = cfg.at("rng_test").value("draws", ex.rng_draws);
    if (cfg.contains("sweep")) {
      const json& s = cfg.at("sweep");
      ex.sweep_param = s.value("param", ex.sweep_param);
      ex.sweep_from = s.value("from", ex.sweep_from);
      ex.sweep_to = s.value("to", ex.sweep_to);
      ex.sweep_step = s.value("step", ex.sweep_step);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }

  if (flags.seed) ex.run.seed = *flags.seed;
  if (flags.bits) ex.run.n_bits = *flags.bits;
  if (flags.iterations) ex.run.iterations = *flags.iterations;
  if (flags.burn_in) ex.run.burn_in = *flags.burn_in;
  if (flags.thin) ex.run.thin = *flags.thin;
  if (flags.compartments) ex.run.compartments = *flags.compartments;
  if (flags.workers) ex.run.workers = *flags.workers;
  if (flags.cvdd) ex.run.cvdd = *flags.cvdd;
  if (flags.temp) ex.run.temperature = *flags.temp;
  if (!flags.out_dir.empty()) ex.out_dir = flags.out_dir;
  if (flags.draws) ex.rng_draws = *flags.draws;
  if (flags.trials) ex.matrix_trials = *flags.trials;
  if (!flags.sweep_param.empty()) ex.sweep_param = flags.sweep_param;
  if (flags.sweep_from) ex.sweep_from = *flags.sweep_from;
  if (flags.sweep_to) ex.sweep_to = *flags.sweep_to;
  if (flags.sweep_step) ex.sweep_step = *flags.sweep_step;
  if (!flags.target_json.empty()) {
    try {
      ex.target_spec = json::parse(flags.target_json);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("--target is not valid JSON: ") + e.what());
    }
  }

  try {
    if (ex.target_spec.is_null()) {
      ex.target = TargetPdf::flat(ex.run.n_bits);
    } else {
      ex.target = TargetPdf::from_json(ex.target_spec);
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad target spec: ") + e.what());
  }
  ex.run.target = &ex.target;
  return ex;
}

// Atomic write: the file appears complete or not at all.
void write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json ledger_json(const PerfLedger& ledger) {
  json per_op = json::object();
  for (int i = 0; i < static_cast<int>(OpKind::kCount); ++i) {
    const OpKind op = static_cast<OpKind>(i);
    per_op[std::string(op_name(op))] = {{"count", ledger.count(op)},
                                        {"energy_fj", ledger.energy_fj(op)}};
  }
  return {{"total_energy_fj", ledger.total_energy_fj()},
          {"total_time_ns", ledger.total_time_ns()},
          {"per_op", per_op}};
}

json common_summary(const Experiment& ex, const SampleSet& s) {
  json summary = {
      {"schema_version", kSchemaVersion},
      {"seed", ex.run.seed},
      {"bits", ex.run.n_bits},
      {"iterations", s.iterations},
      {"burn_in", s.burn_in},
      {"thin", ex.run.thin},
      {"compartments", ex.run.compartments},
      {"cvdd", ex.run.cvdd},
      {"temperature", ex.run.temperature},
      {"acceptance_rate", s.acceptance_rate},
      {"accepted_per_compartment", s.accepted_per_compartment},
      {"retained_samples", s.total_samples()},
      {"partial", s.partial},
  };
  if (ex.target.tabulated() && ex.target.total_bits() <= 16) {
    const Histogram h = Histogram::from_samples(s.pooled(), ex.target.size());
    summary["tv_distance"] = tv_distance(h, ex.target.table());
    try {
      const GofResult gof = chi_square_gof(h, ex.target.table());
      summary["chi_square"] = {{"statistic", gof.statistic},
                               {"p_value", gof.p_value},
                               {"dof", gof.dof}};
    } catch (const std::domain_error&) {
      summary["chi_square"] = nullptr;
    }
  }
  return summary;
}

void write_histogram_csv(const Experiment& ex, const SampleSet& s,
                         const std::filesystem::path& path) {
  if (!ex.target.tabulated() || ex.target.total_bits() > 16) return;
  const Histogram h = Histogram::from_samples(s.pooled(), ex.target.size());
  std::ostringstream csv;
  csv << "value,count\n";
  for (std::size_t i = 0; i < h.bins.size(); ++i) csv << i << "," << h.bins[i] << "\n";
  write_file(path, csv.str());
}

void write_samples_csv(const std::vector<StepRecord>& details,
                       const std::filesystem::path& path) {
  std::ostringstream csv;
  csv << "compartment,iteration,candidate,accepted,value,u8\n";
  for (const auto& d : details) {
    csv << d.compartment << "," << d.iteration << "," << d.candidate << ","
        << (d.accepted ? 1 : 0) << "," << d.value << "," << d.u8 << "\n";
  }
  write_file(path, csv.str());
}

int cmd_sample(Experiment& ex, bool reference) {
  validate(ex.run);
  ex.run.record_details = true;
  const SampleSet s = reference ? run_reference(ex.run) : run(ex.run);
  json summary = common_summary(ex, s);
  summary["command"] = reference ? "reference" : "sample";
  if (!reference) {
    summary["ledger"] = ledger_json(s.ledger);
    summary["hardware_time_ns"] = s.hardware_time_ns;
    summary["energy_per_sample_pj"] =
        blended_energy_pj(ex.run.energy, ex.run.n_bits, s.acceptance_rate);
    summary["throughput_samples_per_s"] =
        throughput_samples_per_s(ex.run.timing, ex.run.n_bits, ex.run.compartments);
  }
  const std::filesystem::path dir(ex.out_dir);
  const std::string prefix = reference ? "reference_" : "";
  write_samples_csv(s.details, dir / (prefix + "samples.csv"));
  write_histogram_csv(ex, s, dir / (prefix + "histogram.csv"));
  write_file(dir / (prefix + "summary.json"), summary.dump(2) + "\n");
  return 0;
}

int cmd_rng_test(const Experiment& ex) {
  if (ex.rng_draws < 1) throw ConfigError("rng-test needs at least one draw");
  const double p = ex.run.flip.bfr_at(ex.run.cvdd, ex.run.temperature);
  PerfLedger ledger;
  MsxorRng rng(RandomStream::derive(ex.run.seed, 0x0752c6), 3, &ledger);
  rng.set_energy_constants(ex.run.energy);

  std::ostringstream csv;
  csv << "draw_index,u8_value\n";
  std::vector<std::uint8_t> values;
  values.reserve(ex.rng_draws);
  Histogram h;
  h.bins.assign(256, 0);
  for (long i = 0; i < ex.rng_draws; ++i) {
    const unsigned v = rng.next_u8(p);
    values.push_back(static_cast<std::uint8_t>(v));
    h.add(v);
    csv << i << "," << v << "\n";
  }
  const auto bias = monobit_bias(values);

  json summary = {
      {"schema_version", kSchemaVersion},
      {"command", "rng-test"},
      {"seed", ex.run.seed},
      {"draws", ex.rng_draws},
      {"p_bfr", p},
      {"lambda3", lambda_after(p, 3)},
      {"bit_frequencies", std::vector<double>(bias.begin(), bias.end())},
      {"degenerate_input", rng.degenerate_seen()},
      {"biased_input", rng.biased_input_seen()},
      {"ledger", ledger_json(ledger)},
  };
  try {
    const GofResult gof = chi_square_gof(h, std::vector<double>(256, 1.0));
    summary["chi_square"] = {{"statistic", gof.statistic},
                             {"p_value", gof.p_value},
                             {"dof", gof.dof}};
  } catch (const std::domain_error&) {
    summary["chi_square"] = nullptr;
  }
  const std::filesystem::path dir(ex.out_dir);
  write_file(dir / "rng.csv", csv.str());
  write_file(dir / "rng_summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_transfer_matrix(const Experiment& ex) {
  if (ex.run.n_bits > 12) throw ConfigError("transfer-matrix is limited to 12 bits");
  const double p = ex.run.flip.bfr_at(ex.run.cvdd, ex.run.temperature);
  const TransferMatrix m = TransferMatrix::build(ex.run.n_bits, p);
  const std::uint64_t dim = m.dim();

  std::ostringstream csv;
  csv << "i,j,prob\n";
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      csv << i << "," << j << "," << fmt_double(m.at(i, j)) << "\n";
    }
  }

  double max_row_err = 0.0, max_asym = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    double sum = 0.0;
    for (std::uint64_t j = 0; j < dim; ++j) {
      sum += m.at(i, j);
      max_asym = std::max(max_asym, std::abs(m.at(i, j) - m.at(j, i)));
    }
    max_row_err = std::max(max_row_err, std::abs(sum - 1.0));
  }
  json summary = {
      {"schema_version", kSchemaVersion},
      {"command", "transfer-matrix"},
      {"bits", ex.run.n_bits},
      {"p_bfr", p},
      {"max_row_sum_error", max_row_err},
      {"max_asymmetry", max_asym},
  };
  if (ex.matrix_trials > 0) {
    const FlipModel& flip = ex.run.flip;
    MacroArray array(1, 64, 64, &flip);
    RandomStream rng = RandomStream::derive(ex.run.seed, 0x7a11);
    json rows = json::array();
    for (std::uint64_t x = 0; x < dim; ++x) {
      const auto freq = empirical_transfer_row(array, x, ex.run.n_bits, ex.run.cvdd,
                                               ex.run.temperature, ex.matrix_trials, rng);
      Histogram h;
      h.bins.assign(dim, 0);
      for (std::uint64_t j = 0; j < dim; ++j) {
        h.bins[j] = static_cast<long long>(std::llround(freq[j] * ex.matrix_trials));
        h.total += h.bins[j];
      }
      std::vector<double> expected(dim);
      for (std::uint64_t j = 0; j < dim; ++j) expected[j] = m.at(x, j);
      const GofResult gof = chi_square_gof(h, expected);
      rows.push_back({{"row", x}, {"p_value", gof.p_value}, {"statistic", gof.statistic}});
    }
    summary["empirical_trials"] = ex.matrix_trials;
    summary["empirical_rows"] = rows;
  }
  const std::filesystem::path dir(ex.out_dir);
  write_file(dir / "transfer_matrix.csv", csv.str());
  write_file(dir / "transfer_summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_perf_report(const Experiment& ex) {
  const EnergyConstants& e = ex.run.energy;
  const TimingConstants& t = ex.run.timing;
  json curve = json::array();
  for (int bits = 4; bits <= 32; bits += 4) {
    curve.push_back({{"bits", bits},
                     {"throughput_samples_per_s",
                      throughput_samples_per_s(t, bits, ex.run.compartments)},
                     {"accepted_pj", energy_per_sample_pj(e, bits, true)},
                     {"rejected_pj", energy_per_sample_pj(e, bits, false)}});
  }
  const AreaReport a = area_report();
  json report = {
      {"schema_version", kSchemaVersion},
      {"command", "perf-report"},
      {"energy_constants",
       {{"random_fj", e.e_random_fj},
        {"copy_fj", e.e_copy_fj},
        {"read_fj", e.e_read_fj},
        {"write_fj", e.e_write_fj},
        {"urng_fj", e.e_urng_fj},
        {"calc_fj", e.e_calc_fj},
        {"urng_share", e.urng_share}}},
      {"timing", {{"base_ns", t.t_base_ns}, {"step_ns", t.t_step_ns}}},
      {"per_sample",
       {{"bits", ex.run.n_bits},
        {"accepted_pj", energy_per_sample_pj(e, ex.run.n_bits, true)},
        {"rejected_pj", energy_per_sample_pj(e, ex.run.n_bits, false)}}},
      {"throughput_curve", curve},
      {"area",
       {{"total_mm2", a.total_mm2},
        {"rw_pct", a.rw_pct},
        {"subarray_pct", a.subarray_pct},
        {"decoders_pct", a.decoders_pct},
        {"urng_pct", a.urng_pct}}},
  };
  write_file(std::filesystem::path(ex.out_dir) / "perf_report.json", report.dump(2) + "\n");
  return 0;
}

int cmd_sweep(Experiment& ex) {
  if (ex.sweep_step <= 0.0 || ex.sweep_from > ex.sweep_to) {
    throw ConfigError("sweep range is empty: need from <= to and step > 0");
  }
  if (ex.sweep_param != "cvdd" && ex.sweep_param != "temp" && ex.sweep_param != "pbfr") {
    throw ConfigError("sweep param must be cvdd, temp, or pbfr");
  }
  validate(ex.run);

  std::ostringstream csv;
  csv << "param,value,p_bfr,lambda3,acceptance_rate,tv\n";
  long points = 0;
  for (double v = ex.sweep_from; v <= ex.sweep_to + 1e-12; v += ex.sweep_step) {
    RunConfig cfg = ex.run;
    double p;
    if (ex.sweep_param == "cvdd") {
      cfg.cvdd = v;
      p = cfg.flip.bfr_at(v, cfg.temperature);
    } else if (ex.sweep_param == "temp") {
      cfg.temperature = v;
      p = cfg.flip.bfr_at(cfg.cvdd, v);
    } else {
      if (v < 0.0 || v > 1.0) throw ConfigError("pbfr sweep values must be in [0,1]");
      cfg.flip = FlipModel::constant(v);
      p = v;
    }
    const SampleSet s = run(cfg);
    double tv = std::nan("");
    if (ex.target.tabulated() && ex.target.total_bits() <= 16) {
      tv = tv_distance(Histogram::from_samples(s.pooled(), ex.target.size()),
                       ex.target.table());
    }
    csv << ex.sweep_param << "," << fmt_double(v) << "," << fmt_double(p) << ","
        << fmt_double(lambda_after(p, 3)) << "," << fmt_double(s.acceptance_rate) << ","
        << fmt_double(tv) << "\n";
    ++points;
  }
  json summary = {{"schema_version", kSchemaVersion},
                  {"command", "sweep"},
                  {"param", ex.sweep_param},
                  {"from", ex.sweep_from},
                  {"to", ex.sweep_to},
                  {"step", ex.sweep_step},
                  {"points", points}};
  const std::filesystem::path dir(ex.out_dir);
  write_file(dir / "sweep.csv", csv.str());
  write_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral simulator of an in-memory MCMC sampling macro"};
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON config file");
  app.add_option("--seed", flags.seed, "RNG seed");
  app.add_option("--bits", flags.bits, "word width in bits (multiple of 4)");
  app.add_option("--iterations", flags.iterations, "chain iterations");
  app.add_option("--burn-in", flags.burn_in, "discarded initial iterations");
  app.add_option("--thin", flags.thin, "keep every k-th retained sample");
  app.add_option("--compartments", flags.compartments, "parallel chains");
  app.add_option("--workers", flags.workers, "worker threads");
  app.add_option("--cvdd", flags.cvdd, "bitcell supply voltage");
  app.add_option("--temp", flags.temp, "temperature in Celsius");
  app.add_option("--out", flags.out_dir, "output directory");
  app.add_option("--target", flags.target_json, "inline JSON target spec");

  auto* sample = app.add_subcommand("sample", "run the hardware-model sampler");
  auto* reference = app.add_subcommand("reference", "run the software reference sampler");
  auto* rng_test = app.add_subcommand("rng-test", "exercise the uniform RNG");
  rng_test->add_option("--draws", flags.draws, "number of u8 draws");
  auto* transfer = app.add_subcommand("transfer-matrix", "emit the proposal matrix");
  transfer->add_option("--trials", flags.trials, "empirical pseudo-reads per row (0 = skip)");
  auto* perf = app.add_subcommand("perf-report", "emit the energy/throughput/area report");
  auto* sweep = app.add_subcommand("sweep", "sweep cvdd, temperature, or p_BFR");
  sweep->add_option("--param", flags.sweep_param, "cvdd | temp | pbfr");
  sweep->add_option("--from", flags.sweep_from, "sweep start");
  sweep->add_option("--to", flags.sweep_to, "sweep end");
  sweep->add_option("--step", flags.sweep_step, "sweep step (> 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    Experiment ex = assemble(flags);
    std::filesystem::create_directories(ex.out_dir);
    if (sample->parsed()) return cmd_sample(ex, false);
    if (reference->parsed()) return cmd_sample(ex, true);
    if (rng_test->parsed()) return cmd_rng_test(ex);
    if (transfer->parsed()) return cmd_transfer_matrix(ex);
    if (perf->parsed()) return cmd_perf_report(ex);
    if (sweep->parsed()) return cmd_sweep(ex);
    std::fprintf(stderr, "error: no subcommand\n");
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CIMMC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cimmc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("missing subcommand and bad flags exit with the config code") {
  CHECK(run_cli("") != 0);
  CHECK(run_cli("--config /nonexistent/cfg.json sample") == 2);
  CHECK(run_cli("--bits 5 sample") == 2);
  CHECK(run_cli("--iterations 0 sample") == 2);
  CHECK(run_cli("--target not-json sample") == 2);
  CHECK(run_cli("--no-such-flag sample") == 2);
}

TEST_CASE("sample on a flat target reports full acceptance") {
  const fs::path dir = fresh_dir("flat");
  CHECK(run_cli("--bits 4 --iterations 2000 --burn-in 100 --compartments 4 --out " +
                dir.string() + " sample") == 0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("schema_version") == 1);
  CHECK(summary.at("acceptance_rate") == 1.0);
  CHECK(summary.at("command") == "sample");
  CHECK(summary.at("retained_samples") == 4 * 1900);

  const std::string csv = slurp(dir / "samples.csv");
  CHECK(csv.rfind("compartment,iteration,candidate,accepted,value,u8\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only

  const std::string hist = slurp(dir / "histogram.csv");
  CHECK(hist.rfind("value,count\n", 0) == 0);
}

TEST_CASE("sample outputs are byte-identical across reruns and worker counts") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const std::string common =
      "--bits 8 --iterations 1500 --burn-in 200 --compartments 6 --seed 99 "
      "--target \"{\\\"type\\\":\\\"gmm\\\",\\\"bits\\\":8}\" ";
  CHECK(run_cli(common + "--workers 1 --out " + a.string() + " sample") == 0);
  CHECK(run_cli(common + "--workers 4 --out " + b.string() + " sample") == 0);
  CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
}

TEST_CASE("reference sampler mirrors the sample outputs") {
  const fs::path dir = fresh_dir("ref");
  CHECK(run_cli("--bits 4 --iterations 1000 --burn-in 100 --compartments 2 --out " +
                dir.string() + " reference") == 0);
  const json summary = json::parse(slurp(dir / "reference_summary.json"));
  CHECK(summary.at("command") == "reference");
  CHECK(summary.at("acceptance_rate") == 1.0);
  CHECK(fs::exists(dir / "reference_samples.csv"));
}

TEST_CASE("rng-test emits the draw CSV and a summary") {
  const fs::path dir = fresh_dir("rng");
  CHECK(run_cli("--seed 7 --out " + dir.string() + " rng-test --draws 20000") == 0);
  const std::string csv = slurp(dir / "rng.csv");
  CHECK(csv.rfind("draw_index,u8_value\n", 0) == 0);
  const json summary = json::parse(slurp(dir / "rng_summary.json"));
  CHECK(summary.at("draws") == 20000);
  CHECK(summary.at("p_bfr") == 0.45);
  CHECK(summary.at("bit_frequencies").size() == 8);
  for (const auto& f : summary.at("bit_frequencies")) {
    CHECK(std::abs(f.get<double>() - 0.5) < 0.02);
  }
}

TEST_CASE("transfer-matrix emits a symmetric row-stochastic matrix") {
  const fs::path dir = fresh_dir("tm");
  CHECK(run_cli("--bits 4 --out " + dir.string() + " transfer-matrix") == 0);
  const json summary = json::parse(slurp(dir / "transfer_summary.json"));
  CHECK(summary.at("max_row_sum_error").get<double>() < 1e-12);
  CHECK(summary.at("max_asymmetry").get<double>() < 1e-15);
  const std::string csv = slurp(dir / "transfer_matrix.csv");
  CHECK(csv.rfind("i,j,prob\n", 0) == 0);
}

TEST_CASE("perf-report carries the published design points") {
  const fs::path dir = fresh_dir("perf");
  CHECK(run_cli("--out " + dir.string() + " perf-report") == 0);
  const json report = json::parse(slurp(dir / "perf_report.json"));
  CHECK(report.at("per_sample").at("accepted_pj").get<double>() ==
        doctest::Approx(0.506465625));
  CHECK(report.at("throughput_curve").size() == 8);
  CHECK(report.at("throughput_curve")[0].at("throughput_samples_per_s").get<double>() ==
        doctest::Approx(166.67e6).epsilon(1e-3));
  CHECK(report.at("area").at("total_mm2") == 0.1967);
}

TEST_CASE("sweep validates its range and writes one row per point") {
  const fs::path dir = fresh_dir("sweep");
  CHECK(run_cli("--out " + dir.string() + " sweep --param pbfr --from 0.5 --to 0.4 --step 0.01") ==
        2);
  CHECK(run_cli("--out " + dir.string() + " sweep --param pbfr --from 0.4 --to 0.5 --step 0") ==
        2);
  CHECK(run_cli("--bits 4 --iterations 500 --burn-in 100 --compartments 2 --out " + dir.string() +
                " sweep --param pbfr --from 0.40 --to 0.50 --step 0.01") == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("param,value,p_bfr,lambda3,acceptance_rate,tv\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 12);  // header + 11 sweep points
}

TEST_CASE("config file fields are overridden by flags") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg = dir / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"bits": 4, "iterations": 800, "burn_in": 100, "compartments": 2, "seed": 5})";
  }
  CHECK(run_cli("--config " + cfg.string() + " --iterations 600 --out " + dir.string() +
                " sample") == 0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("iterations") == 600);  // flag wins
  CHECK(summary.at("seed") == 5);          // config survives
}

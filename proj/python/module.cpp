#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "cimmc/mh_sampler.hpp"
#include "cimmc/msxor_rng.hpp"
#include "cimmc/stats.hpp"

namespace py = pybind11;
using namespace cimmc;

PYBIND11_MODULE(_cimmc, m) {
  m.doc() = "Behavioral simulator of an in-memory MCMC sampling macro";

  m.def("lambda_after", &lambda_after, py::arg("lambda0"), py::arg("stages"));
  m.def("transfer_prob", &transfer_prob, py::arg("x"), py::arg("y"), py::arg("p"),
        py::arg("n_bits"));
  m.def("accept_check", &accept_check, py::arg("p_cur"), py::arg("p_cand"), py::arg("u8"));

  py::class_<TransferMatrix>(m, "TransferMatrix")
      .def_static("build", &TransferMatrix::build, py::arg("n_bits"), py::arg("p"))
      .def_readonly("n_bits", &TransferMatrix::n_bits)
      .def_readonly("p", &TransferMatrix::p)
      .def("at", &TransferMatrix::at, py::arg("i"), py::arg("j"))
      .def("dim", &TransferMatrix::dim);

  py::class_<FlipModel>(m, "FlipModel")
      .def_static("defaults", &FlipModel::defaults)
      .def_static("constant", &FlipModel::constant, py::arg("p"))
      .def("bfr_at", &FlipModel::bfr_at, py::arg("cvdd"), py::arg("temperature"))
      .def("symmetric", &FlipModel::symmetric);

  py::class_<MsxorRng>(m, "MsxorRng")
      .def(py::init([](std::uint64_t seed, int stages) {
             return MsxorRng(RandomStream(seed), stages);
           }),
           py::arg("seed"), py::arg("stages") = 3)
      .def("next_u8", &MsxorRng::next_u8, py::arg("p"))
      .def("raw_bits", &MsxorRng::raw_bits, py::arg("p"))
      .def("output_bits", &MsxorRng::output_bits);

  py::class_<TargetPdf>(m, "TargetPdf")
      .def_static("from_table", &TargetPdf::from_table, py::arg("table"))
      .def_static("flat", &TargetPdf::flat, py::arg("total_bits"))
      .def_static("default_gmm", &TargetPdf::default_gmm, py::arg("bits"))
      .def_static("default_mgd", &TargetPdf::default_mgd, py::arg("bits_per_dim"))
      .def_static(
          "from_json",
          [](const std::string& spec) { return TargetPdf::from_json(nlohmann::json::parse(spec)); },
          py::arg("spec_json"))
      .def("density", &TargetPdf::density, py::arg("word"))
      .def("grid_point", &TargetPdf::grid_point, py::arg("word"))
      .def("dims", &TargetPdf::dims)
      .def("total_bits", &TargetPdf::total_bits)
      .def("size", &TargetPdf::size)
      .def("table", &TargetPdf::table)
      .def("normalized", &TargetPdf::normalized);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("n_bits", &RunConfig::n_bits)
      .def_readwrite("iterations", &RunConfig::iterations)
      .def_readwrite("burn_in", &RunConfig::burn_in)
      .def_readwrite("thin", &RunConfig::thin)
      .def_readwrite("compartments", &RunConfig::compartments)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("cvdd", &RunConfig::cvdd)
      .def_readwrite("temperature", &RunConfig::temperature)
      .def_readwrite("shared_u", &RunConfig::shared_u)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("wrap_window", &RunConfig::wrap_window)
      .def_readwrite("flip", &RunConfig::flip);

  py::class_<SampleSet>(m, "SampleSet")
      .def_readonly("samples", &SampleSet::samples)
      .def_readonly("accepted_per_compartment", &SampleSet::accepted_per_compartment)
      .def_readonly("acceptance_rate", &SampleSet::acceptance_rate)
      .def_readonly("partial", &SampleSet::partial)
      .def_readonly("hardware_time_ns", &SampleSet::hardware_time_ns)
      .def("pooled", &SampleSet::pooled)
      .def("total_samples", &SampleSet::total_samples)
      .def("total_energy_fj",
           [](const SampleSet& s) { return s.ledger.total_energy_fj(); });

  m.def(
      "run",
      [](RunConfig config, const TargetPdf& target) {
        config.target = &target;
        return run(config);
      },
      py::arg("config"), py::arg("target"));
  m.def(
      "run_reference",
      [](RunConfig config, const TargetPdf& target) {
        config.target = &target;
        return run_reference(config);
      },
      py::arg("config"), py::arg("target"));

  m.def(
      "energy_per_sample_pj",
      [](int n_bits, bool accepted) { return energy_per_sample_pj(EnergyConstants{}, n_bits, accepted); },
      py::arg("n_bits"), py::arg("accepted"));
  m.def(
      "blended_energy_pj",
      [](int n_bits, double rate) { return blended_energy_pj(EnergyConstants{}, n_bits, rate); },
      py::arg("n_bits"), py::arg("acceptance_rate"));
  m.def(
      "throughput_samples_per_s",
      [](int n_bits, int compartments) {
        return throughput_samples_per_s(TimingConstants{}, n_bits, compartments);
      },
      py::arg("n_bits"), py::arg("compartments"));

  m.def("tv_distance", [](const std::vector<std::uint64_t>& samples,
                          const std::vector<double>& target) {
    return tv_distance(Histogram::from_samples(samples, target.size()), target);
  });
  m.def("chi_square_gof", [](const std::vector<std::uint64_t>& samples,
                             const std::vector<double>& target) {
    const GofResult r = chi_square_gof(Histogram::from_samples(samples, target.size()), target);
    return py::make_tuple(r.statistic, r.p_value, r.dof);
  });
  m.def("chi_square_sf", &chi_square_sf, py::arg("statistic"), py::arg("dof"));
}

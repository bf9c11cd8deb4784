#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rytov/bessel.hpp"
#include "rytov/diagnostics.hpp"
#include "rytov/errors.hpp"
#include "rytov/experiment.hpp"
#include "rytov/forward.hpp"
#include "rytov/greens.hpp"
#include "rytov/inversion.hpp"
#include "rytov/model.hpp"
#include "rytov/series.hpp"

namespace py = pybind11;
using namespace rytov;

namespace {

RadialProfile as_profile(const Vector& v) { return {v, ProfileRole::eta_true}; }

std::vector<Vector> values_of(const std::vector<RadialProfile>& ps) {
  std::vector<Vector> out;
  out.reserve(ps.size());
  for (const RadialProfile& p : ps) out.push_back(p.values);
  return out;
}

py::dict to_dict(const Reconstruction& r) {
  py::dict d;
  d["terms"] = values_of(r.terms);
  d["partial_sums"] = values_of(r.partial_sums);
  d["mu_a"] = r.mu_a.values;
  d["term_norms"] = r.term_norms;
  d["term_ratio"] = r.term_ratio;
  d["radius_product"] = r.radius_product;
  d["divergence_suspected"] = r.divergence_suspected;
  return d;
}

py::dict to_dict(const ConvergenceReport& rep) {
  py::dict d;
  d["mu"] = rep.mu;
  d["nu"] = rep.nu;
  d["eta_norm"] = rep.eta_norm;
  d["forward_radius_ok"] = rep.forward_radius_ok;
  d["mu_per_mode"] = rep.mu_per_mode;
  d["nu_per_mode"] = rep.nu_per_mode;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rytov, m) {
  m.doc() = "Inverse Rytov series for a radially symmetric disk";
  m.attr("__version__") = std::string(kRevision);

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ProblemConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("k", &ProblemConfig::k)
      .def_readwrite("R", &ProblemConfig::R)
      .def_readwrite("R_a", &ProblemConfig::R_a)
      .def_readwrite("ell", &ProblemConfig::ell)
      .def_readwrite("eta_a", &ProblemConfig::eta_a)
      .def_readwrite("N_r", &ProblemConfig::N_r)
      .def_readwrite("M_SD", &ProblemConfig::M_SD)
      .def_readwrite("order", &ProblemConfig::order)
      .def_readwrite("gamma", &ProblemConfig::gamma)
      .def_readwrite("seed", &ProblemConfig::seed)
      .def_property(
          "sv_count",
          [](const ProblemConfig& c) -> py::object {
            if (const auto* n = std::get_if<SvCount>(&c.sv_policy)) return py::int_(n->value);
            return py::none();
          },
          [](ProblemConfig& c, int n) { c.sv_policy = SvCount{n}; })
      .def_property(
          "sv_threshold",
          [](const ProblemConfig& c) -> py::object {
            if (const auto* t = std::get_if<SvThreshold>(&c.sv_policy)) return py::float_(t->sigma0);
            return py::none();
          },
          [](ProblemConfig& c, double s) { c.sv_policy = SvThreshold{s}; })
      .def_property_readonly("g", &ProblemConfig::g)
      .def("validate", &ProblemConfig::validate)
      .def_static("parse", [](const std::string& text) { return parse_config(text); })
      .def_static("load", &load_config, py::arg("path"))
      .def("format", [](const ProblemConfig& c) { return format_config(c); })
      .def("__eq__", [](const ProblemConfig& a, const ProblemConfig& b) { return a == b; })
      .def("__repr__", [](const ProblemConfig& c) { return "Config(\n" + format_config(c) + ")"; });

  m.def("bessel_i", [](int n, double x) { return bessel_i(n, x).to_double(); }, py::arg("n"), py::arg("x"));
  m.def("bessel_k", [](int n, double x) { return bessel_k(n, x).to_double(); }, py::arg("n"), py::arg("x"));
  m.def("log_bessel_i", [](int n, double x) { return bessel_i(n, x).log_abs(); }, py::arg("n"), py::arg("x"));
  m.def("log_bessel_k", [](int n, double x) { return bessel_k(n, x).log_abs(); }, py::arg("n"), py::arg("x"));

  m.def("grid_points", [](const ProblemConfig& c) { return make_grid(c).points(); }, py::arg("config"));
  m.def("true_profile", [](const ProblemConfig& c) { return true_profile(c, make_grid(c)).values; },
        py::arg("config"));
  m.def("g_mode", &g_mode, py::arg("n"), py::arg("r"), py::arg("r_prime"), py::arg("config"));
  m.def("u0_boundary", &u0_boundary, py::arg("alpha"), py::arg("config"));

  m.def("exact_boundary_data", [](const ProblemConfig& c) { return exact_boundary_data(c).values; },
        py::arg("config"));
  m.def("add_noise", &add_noise, py::arg("u0"), py::arg("u"), py::arg("gamma"), py::arg("seed"),
        "Returns the noisy (u0, u) pair.");
  m.def(
      "synthesize_data",
      [](const ProblemConfig& c) {
        const SyntheticData s = synthesize_data(c);
        py::dict d;
        d["u0"] = s.noisy.u0;
        d["u"] = s.noisy.u;
        d["psi_clean"] = s.psi_clean.values;
        d["psi"] = s.psi.values;
        d["has_noise"] = s.has_noise;
        return d;
      },
      py::arg("config"));
  m.def(
      "fd_oracle",
      [](int n, const ProblemConfig& c, int fd_points, bool layered) {
        return fd_oracle(n, layered ? layered_step(c) : StepProfile{}, c, fd_points);
      },
      py::arg("n"), py::arg("config"), py::arg("fd_points") = 10000, py::arg("layered") = false);
  m.def("compositions", &compositions, py::arg("j"), py::arg("m"));

  py::class_<Experiment>(m, "Experiment")
      .def(py::init<const ProblemConfig&>(), py::arg("config"))
      .def_property_readonly("config", &Experiment::config)
      .def_property_readonly("grid", [](const Experiment& e) { return e.grid().points(); })
      .def_property_readonly("j1", [](const Experiment& e) { return e.map().j1; })
      .def_property_readonly("spectrum", [](const Experiment& e) { return e.inverse().spectrum; })
      .def_property_readonly("sigma", [](const Experiment& e) { return e.inverse().sigma; })
      .def_property_readonly("pseudoinverse", [](const Experiment& e) { return e.inverse().pseudoinverse; })
      .def_property_readonly("projection", [](const Experiment& e) { return projection_matrix(e.inverse()); })
      .def_property_readonly("timings", &Experiment::timings)
      .def("kernel", [](const Experiment& e, int alpha) {
             if (alpha < 1 || alpha > e.table().num_modes()) throw DomainError("kernel: alpha out of range");
             return e.table().mode(alpha - 1).kernel;
           }, py::arg("alpha"))
      .def("apply_tsvd", [](const Experiment& e, const Vector& psi) {
             return apply_tsvd(e.inverse(), BoundaryData{psi}).values;
           }, py::arg("psi"))
      .def("projected_truth", [](const Experiment& e, const Vector& eta) {
             return projected_truth(as_profile(eta), e.map(), e.inverse()).values;
           }, py::arg("eta"))
      .def("forward_term", [](const Experiment& e, int j, const Vector& eta) {
             if (j < 1) throw DomainError("forward_term: j must be >= 1");
             const std::vector<RadialProfile> args(static_cast<std::size_t>(j), as_profile(eta));
             return rytov_forward(j, args, e.table());
           }, py::arg("j"), py::arg("eta"), "psi_j(eta, ..., eta)")
      .def("discrete_boundary_data", [](const Experiment& e, const Vector& eta) {
             return discrete_boundary_data(as_profile(eta), e.table());
           }, py::arg("eta"))
      .def("reconstruct", [](const Experiment& e, const Vector& psi, int order) {
             Reconstruction r;
             {
               py::gil_scoped_release release;
               r = reconstruct(BoundaryData{psi}, e.table(), e.inverse(), order);
             }
             return to_dict(r);
           }, py::arg("psi"), py::arg("order"))
      .def("run_reconstruction", [](const Experiment& e, const Vector& psi, int order) {
             const ReconstructionRun run = run_reconstruction(e, BoundaryData{psi}, order);
             py::dict d = to_dict(run.result);
             d["eta_true"] = run.eta_true.values;
             d["eta_proj"] = run.eta_proj.values;
             d["errors"] = run.errors;
             return d;
           }, py::arg("psi"), py::arg("order"))
      .def("estimate_mu_nu", [](const Experiment& e, double g_scale) {
             return to_dict(estimate_mu_nu(e.config(), e.table(), g_scale));
           }, py::arg("g_scale") = 1.0)
      .def("rel_l2_error", [](const Experiment& e, const Vector& a, const Vector& b) {
             return rel_l2_error(as_profile(a), as_profile(b), e.grid());
           }, py::arg("a"), py::arg("b"));
}

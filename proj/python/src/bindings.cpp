#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hocm/criteria.hpp"
#include "hocm/emit.hpp"
#include "hocm/scan.hpp"
#include "hocm/verify.hpp"

namespace py = pybind11;
using namespace hocm;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
std::string scan_json(const std::string& config, bool refine, int threads) {
  ScanOptions opts;
  opts.refine = refine;
  opts.threads = threads;
  ScanResult r;
  {
    py::gil_scoped_release release;
    r = run_scan(config_from_json(nlohmann::json::parse(config)), opts);
  }
  return result_to_json(r).dump();
}

std::string verify_json(const std::string& config, bool fast, int threads) {
  VerifyOptions opts;
  opts.fast = fast;
  opts.threads = threads;
  VerifyReport r;
  {
    py::gil_scoped_release release;
    r = verify(config_from_json(nlohmann::json::parse(config)), opts);
  }
  return report_to_json(r).dump();
}

py::dict ppt(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Omega, const std::string& vector,
             const std::string& bipartition, const std::vector<ModeId>& modes) {
  HOCMBundle b;
  b.spec = parse_vector("v", vector);
  if (V.rows() != long(b.spec.dim()) || V.cols() != V.rows() || Omega.rows() != V.rows() ||
      Omega.cols() != V.rows())
    throw CriteriaError("V and Omega must be square with one row per vector element");
  b.V = V;
  b.Omega = Omega;
  b.means.assign(b.spec.dim(), 0.0);
  const auto v = ppt_min_eig(b, parse_bipartition(bipartition, modes));
  py::dict out;
  out["nu_min"] = v.nu_min;
  out["nu_block"] = v.nu_block;
  out["order"] = v.order;
  out["class"] = to_string(v.sufficiency);
  out["verdict"] = to_string(v.verdict);
  out["entangled"] = v.entangled();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AlgebraError>(m, "AlgebraError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_ValueError);
  py::register_exception<CriteriaError>(m, "CriteriaError", PyExc_ValueError);

  m.def("builtin_names", &builtin_names);
  m.def("builtin_config_json", [](const std::string& name) { return config_to_json(builtin_scenario(name)).dump(); });
  m.def("scan_json", &scan_json, py::arg("config"), py::arg("refine") = true, py::arg("threads") = 0);
  m.def("verify_json", &verify_json, py::arg("config"), py::arg("fast") = false, py::arg("threads") = 0);
  m.def("normal_order", [](const std::string& words) { return normal_order(parse_words(words)).to_string(); });
  m.def("commutator", [](const std::string& x, const std::string& y) {
    return commutator(parse_expression(x), parse_expression(y)).to_string();
  });
  m.def("required_pump_cutoff", [](double alpha) { return required_pump_cutoff(alpha); });
  m.def("ppt_min_eig", &ppt, py::arg("V"), py::arg("Omega"), py::arg("vector"), py::arg("bipartition"),
        py::arg("modes"));
}

#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "cscale/bergman.hpp"
#include "cscale/cli.hpp"
#include "cscale/error.hpp"
#include "cscale/geometry.hpp"
#include "cscale/harmonic.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/wu.hpp"

namespace py = pybind11;
using namespace cscale;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

DefiningFunction domain(const std::string& name, int dim, int k, int m, double radius) {
  CatalogParams p;
  p.dim = dim;
  p.k = k;
  p.m = m;
  p.radius = radius;
  return make_catalog_domain(name, p);
}

MonomialKernel kernel(const std::string& tag, int dim, int k, int trunc) {
  BergmanDomain b;
  b.tag = tag;
  b.dim = tag == "disc" ? 1 : dim;
  b.k = k;
  return monomial_norms(b, trunc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Complex scaling toolkit";

  py::register_exception<Error>(m, "CscaleError", PyExc_ValueError);

  m.def("catalog_names", &catalog_names);

  m.def(
      "defining_function",
      [](const std::string& name, const CVec& z, int dim, int k, int mm, double radius) {
        return domain(name, dim, k, mm, radius)(z);
      },
      py::arg("domain"), py::arg("z"), py::arg("dim") = 2, py::arg("k") = 1, py::arg("m") = 1,
      py::arg("radius") = 1.0);

  m.def(
      "levi",
      [](const std::string& name, const CVec& p, int dim, int k, int mm, bool normalize) {
        LeviOptions o;
        o.normalize = normalize;
        return to_py(to_json(levi_classify(domain(name, dim, k, mm, 1.0), p, o)));
      },
      py::arg("domain"), py::arg("p"), py::arg("dim") = 2, py::arg("k") = 1, py::arg("m") = 1,
      py::arg("normalize") = false);

  m.def(
      "order_of_contact",
      [](const std::string& name, const CVec& p, int dim, int k, int mm) -> std::optional<int> {
        return order_of_contact(domain(name, dim, k, mm, 1.0), p).finite_type;
      },
      py::arg("domain"), py::arg("p"), py::arg("dim") = 2, py::arg("k") = 1, py::arg("m") = 1);

  m.def(
      "kobayashi_metric",
      [](const std::string& name, const CVec& q, const CVec& xi, int dim, int k, int mm) {
        const auto v = kobayashi_metric(domain(name, dim, k, mm, 1.0), q, xi);
        return py::make_tuple(v.value, v.lower, v.upper);
      },
      py::arg("domain"), py::arg("q"), py::arg("xi"), py::arg("dim") = 2, py::arg("k") = 1, py::arg("m") = 1,
      "Returns (value, lower, upper).");

  m.def("ball_metric", &ball_metric, py::arg("q"), py::arg("xi"), py::arg("radius") = 1.0);

  m.def(
      "bergman_kernel",
      [](const std::string& tag, const CVec& z, const CVec& w, int dim, int k, int trunc) {
        return bergman_kernel(kernel(tag, dim, k, trunc), z, w);
      },
      py::arg("domain"), py::arg("z"), py::arg("w"), py::arg("dim") = 2, py::arg("k") = 2, py::arg("trunc") = 32);

  m.def(
      "sectional_curvature",
      [](const std::string& tag, const CVec& q, const CVec& xi, int dim, int k, int trunc) {
        return sectional_curvature(kernel(tag, dim, k, trunc), q, xi).curvature;
      },
      py::arg("domain"), py::arg("q"), py::arg("xi"), py::arg("dim") = 2, py::arg("k") = 2, py::arg("trunc") = 48);

  m.def(
      "wu_metric",
      [](const std::string& name, const CVec& q, int resolution, int dim, int k) {
        return wu_metric(domain(name, dim, k, 1, 1.0), q, resolution).H;
      },
      py::arg("domain"), py::arg("q"), py::arg("resolution") = 32, py::arg("dim") = 2, py::arg("k") = 1);

  m.def("poisson_ball", &poisson_ball, py::arg("x"), py::arg("y"));
  m.def("poisson_integral", &poisson_integral, py::arg("r"), py::arg("n"), py::arg("rel_tol") = 1e-12);

  m.def(
      "run_command",
      [](const std::string& command, const std::map<std::string, std::string>& config) {
        RunConfig cfg;
        cfg.command = command;
        cfg.timestamp = false;
        for (const auto& [k, v] : config) cfg.values.set(k, v);
        return to_py(report_document(cfg, execute(cfg)));
      },
      py::arg("command"), py::arg("config") = std::map<std::string, std::string>{},
      "Runs a CLI command and returns the report document as a dict.");

  m.def(
      "main",
      [](const std::vector<std::string>& argv) {
        std::ostringstream out, err;
        std::vector<std::string> args{"cscale"};
        args.insert(args.end(), argv.begin(), argv.end());
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("argv"), "Returns (exit_code, stdout, stderr).");
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schurlab/errors.hpp"
#include "schurlab/groups.hpp"
#include "schurlab/harmonic.hpp"
#include "schurlab/io.hpp"
#include "schurlab/matcore.hpp"
#include "schurlab/runner.hpp"

namespace py = pybind11;
using namespace schurlab;

namespace {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ConfigInvalid, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Schur multiplier laboratory: core bindings";

  static py::exception<Error> base(m, "SchurLabError", PyExc_RuntimeError);
  static py::exception<Error> config_error(m, "ConfigInvalid", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (e.kind() == ErrorKind::ConfigInvalid) {
        py::set_error(config_error, msg.c_str());
      } else {
        py::set_error(base, msg.c_str());
      }
    }
  });

  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  m.def("singular_values", [](const Matrix& a) { return Vector(singular_spectrum(a)); }, py::arg("a"));
  m.def("schatten_norm", py::overload_cast<const Matrix&, double>(&schatten_norm), py::arg("a"),
        py::arg("p"));
  m.def("schur_product", &schur_product, py::arg("symbol"), py::arg("a"));
  m.def("multiplier_ratio", &multiplier_ratio, py::arg("symbol"), py::arg("a"), py::arg("p"));
  m.def("multiplier_norm_lower_bound", &multiplier_norm_lower_bound, py::arg("symbol"), py::arg("p"),
        py::arg("budget") = 8, py::arg("seed") = 0);
  m.def("riesz_projection_constant", &riesz_projection_constant, py::arg("p"));
  m.def(
      "cotlar_check",
      [](const std::string& group, int samples, std::uint64_t seed) {
        const auto g = parse_group(group);
        if (!g) fail(ErrorKind::InvalidArgument, "unknown group '" + group + "'");
        const CotlarResult r = cotlar_pointwise_check(*g, samples, seed);
        return py::dict(py::arg("failures") = r.failures, py::arg("checked") = r.checked,
                        py::arg("rejected") = r.rejected);
      },
      py::arg("group"), py::arg("samples"), py::arg("seed") = 0);
  m.def(
      "subalgebra_check",
      [](const std::string& algebra, const std::vector<Vector>& subspace, int dim, double tol) {
        return subalgebra_check(lie_algebra(algebra, dim), subspace, tol).ok;
      },
      py::arg("algebra"), py::arg("subspace"), py::arg("dim") = 0, py::arg("tol") = 1e-9);

  // JSON travels as text; the Python wrapper converts to and from dicts.
  m.def(
      "run_experiment_json",
      [](const std::string& config, std::optional<std::uint64_t> seed, std::optional<int> jobs) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(parse_json(config), RunOptions{seed, jobs});
        }
        return r.report.dump();
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("jobs") = py::none());
  m.def("schema_json", [](const std::string& name) { return embedded_schema(name).dump(); },
        py::arg("name"));
  m.def(
      "validate_json",
      [](const std::string& instance, const std::string& schema) {
        return validate_json(parse_json(instance), parse_json(schema));
      },
      py::arg("instance"), py::arg("schema"));
}

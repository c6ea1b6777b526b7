#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "ridgeapprox/construct.hpp"
#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/experiment.hpp"
#include "ridgeapprox/metrics.hpp"
#include "ridgeapprox/packing.hpp"

namespace py = pybind11;
using namespace ridge;

namespace {

// rows of an (n, d) array, or a single length-d vector (returns a float)
py::object eval_points(const std::function<double(std::span<const double>)>& f, int dim,
                                py::array_t<double, py::array::c_style | py::array::forcecast> x) {
  const auto buf = x.request();
  if (buf.ndim == 1 && buf.shape[0] == dim)
    return py::float_(f({static_cast<const double*>(buf.ptr), static_cast<std::size_t>(dim)}));
  if (buf.ndim != 2 || buf.shape[1] != dim) throw UsageError("points must have shape (n, " + std::to_string(dim) + ")");
  const auto* p = static_cast<const double*>(buf.ptr);
  py::array_t<double> out(buf.shape[0]);
  auto o = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i) o(i) = f({p + i * dim, static_cast<std::size_t>(dim)});
  return std::move(out);
}

py::object json_to_py(const io::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

io::Json py_to_json(const py::object& o) {
  return io::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ExperimentConfig config_from(const py::dict& kw) {
  return ExperimentConfig::from_json(py_to_json(kw));
}

}  // namespace

PYBIND11_MODULE(_ridgeapprox, m) {
  m.doc() = "Sparse ReLU and squared-ReLU ridge approximations of spectral targets.";
  m.attr("__version__") = kToolVersion;

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<BuildFailure>(m, "BuildFailure", PyExc_RuntimeError);

  py::class_<ResolvedTarget>(m, "Target")
      .def_readonly("name", &ResolvedTarget::name)
      .def_property_readonly("dim", [](const ResolvedTarget& t) { return t.function.dim; })
      .def_property_readonly("order", [](const ResolvedTarget& t) { return t.representation.order(); })
      .def_property_readonly("v", [](const ResolvedTarget& t) { return t.representation.scale(); })
      .def("__call__", [](const ResolvedTarget& t, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        return eval_points(t.function.eval, t.function.dim, x);
      })
      .def("residual", [](const ResolvedTarget& t, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        return eval_points([&](std::span<const double> p) { return t.representation.residual(p); }, t.function.dim, x);
      }, "Target minus its affine or quadratic correction, as reproduced by the representation.");

  py::class_<RidgeCombination>(m, "Combination")
      .def_readonly("dim", &RidgeCombination::dim)
      .def_readonly("order", &RidgeCombination::order)
      .def_readonly("v", &RidgeCombination::v)
      .def_readonly("b0", &RidgeCombination::b0)
      .def_readonly("a0", &RidgeCombination::a0)
      .def("__len__", &RidgeCombination::size)
      .def_property_readonly("sparsity", &RidgeCombination::max_inner_sparsity)
      .def("__call__", [](const RidgeCombination& c, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        return eval_points([&](std::span<const double> p) { return eval_combination(c, p); }, c.dim, x);
      })
      .def("to_dict", [](const RidgeCombination& c) { return json_to_py(io::to_json(c)); })
      .def_static("from_dict", [](const py::object& d) { return io::combination_from_json(py_to_json(d)); });

  m.def("resolve_target", &resolve_target, py::arg("spec"), py::arg("s") = 2,
        "Target from 'sine-ridge:1,2' or 'cosine-sum:<file>'.");

  m.def("build", [](const ResolvedTarget& target, const std::string& method, long mm, std::uint64_t seed,
                    const std::string& epsilon, int m0, const std::string& mass_mode) {
          ExperimentConfig cfg;
          cfg.epsilon = epsilon;
          cfg.m0 = m0;
          cfg.mass_mode = mass_mode;
          py::gil_scoped_release release;
          return build_method(target, method, mm, seed, cfg);
        },
        py::arg("target"), py::arg("method") = "iid", py::arg("m") = 16, py::arg("seed") = 1,
        py::arg("epsilon") = "default", py::arg("m0") = 4, py::arg("mass_mode") = "exact");

  m.def("l2_error", [](const ResolvedTarget& t, const RidgeCombination& c) {
    py::gil_scoped_release release;
    return l2_error(t.function, c);
  });
  m.def("linf_error", [](const ResolvedTarget& t, const RidgeCombination& c, int resolution) {
    GridSpec g;
    g.resolution = resolution;
    py::gil_scoped_release release;
    return linf_error(t.function, c, g);
  }, py::arg("target"), py::arg("c"), py::arg("resolution") = 0);

  m.def("fit_rate", [](const std::vector<std::pair<double, double>>& pts) { return json_to_py(io::to_json(fit_rate(pts))); });
  m.def("lower_bound_floor", &lower_bound_floor, py::arg("m"), py::arg("d"), py::arg("s"), py::arg("A") = 1.0);

  m.def("rate_sweep", [](const py::dict& config) {
    const auto cfg = config_from(config);
    SweepResult r;
    {
      py::gil_scoped_release release;
      r = rate_sweep(cfg);
    }
    return py::make_tuple(results_csv(r), json_to_py(r.fits));
  }, "Runs a sweep from config keys; returns (results CSV text, fits dict).");

  m.def("verify", [](const std::string& which, std::uint64_t seed) {
    return json_to_py(to_json(verify_suite(which, seed)));
  }, py::arg("which"), py::arg("seed") = 1);

  m.def("sine_family_size", [](int R, int d) { return sine_family(R, d).size(); });
  m.def("select_packing", [](int R, int d, std::size_t target_size, std::uint64_t seed) {
    const auto fam = sine_family(R, d);
    const auto p = select_packing(fam, target_size, seed);
    py::dict out;
    out["codewords"] = p.codewords;
    out["min_distance"] = p.min_distance;
    out["separation_bound"] = p.separation_bound;
    out["shortfall"] = p.shortfall;
    return out;
  }, py::arg("R"), py::arg("d"), py::arg("target_size"), py::arg("seed") = 1);
  m.def("packing_cardinality", &packing_cardinality);
}

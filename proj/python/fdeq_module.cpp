#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fdeq/combinatorics.hpp"
#include "fdeq/montecarlo.hpp"
#include "fdeq/spectra.hpp"

namespace py = pybind11;
using namespace fdeq;

namespace {

SolveOptions options_from_kwargs(const ParsedConfig& cfg, double epsilon, int quad_nodes, double tol,
                                 int max_iter, double damping) {
  SolveOptions o = cfg.solve;
  if (epsilon > 0) o.epsilon = epsilon;
  if (quad_nodes > 0) o.quad_nodes = quad_nodes;
  if (tol > 0) o.tolerance = tol;
  if (max_iter > 0) o.max_iter = max_iter;
  if (damping > 0) o.damping = damping;
  return o;
}

py::dict curve_to_dict(const DensityCurve& c) {
  py::dict d;
  d["t"] = c.grid;
  d["density"] = c.values;
  d["epsilon"] = c.epsilon;
  d["mass"] = c.mass;
  d["pre_clamp_min"] = c.pre_clamp_min;
  d["failed_points"] = c.failed;
  return d;
}

} // namespace

PYBIND11_MODULE(_fdeq, m) {
  m.doc() = "spectral densities of self-adjoint polynomial matrix models";

  py::register_exception<Error>(m, "FdeqError");

  py::class_<ParsedConfig>(m, "Model")
      .def_property_readonly("blocks",
                             [](const ParsedConfig& c) { return c.spec.space.block_dims; })
      .def_property_readonly("polynomial", [](const ParsedConfig& c) { return c.polynomial_text; })
      .def_property_readonly("target_block", [](const ParsedConfig& c) { return c.spec.target_block; })
      .def_property_readonly(
          "symbols",
          [](const ParsedConfig& c) {
            py::list out;
            for (const auto& [name, sym] : c.spec.symbols) {
              py::dict s;
              s["name"] = name;
              s["kind"] = kind_name(sym.kind);
              s["row_block"] = sym.row_block;
              s["col_block"] = sym.col_block;
              out.append(s);
            }
            return out;
          })
      .def("__repr__", [](const ParsedConfig& c) {
        return "<fdeq.Model blocks=" + std::to_string(c.spec.space.block_count()) +
               " poly='" + c.polynomial_text + "'>";
      });

  m.def("load_config", &parse_config_file, py::arg("path"),
        "Parse a model configuration file into a Model.");
  m.def(
      "load_config_text",
      [](const std::string& text, const std::string& base_dir) { return parse_config(text, base_dir); },
      py::arg("text"), py::arg("base_dir") = ".",
      "Parse a model configuration from a string.");

  m.def(
      "scalar_cauchy",
      [](const ParsedConfig& cfg, cpx z, double eps, double tol, int quad_nodes) {
        SolveOptions o = options_from_kwargs(cfg, -1, quad_nodes, tol, -1, -1);
        Solver solver(cfg.spec, o);
        return solver.scalar_cauchy(z, eps);
      },
      py::arg("model"), py::arg("z"), py::arg("eps") = 0.0, py::arg("tol") = -1.0,
      py::arg("quad_nodes") = -1,
      "Scalar Cauchy transform of the limit model at z (Im z > 0).");

  m.def(
      "solve_density",
      [](const ParsedConfig& cfg, double lo, double hi, int points, double epsilon, int threads,
         double tol, int quad_nodes) {
        SolveOptions o = options_from_kwargs(cfg, epsilon, quad_nodes, tol, -1, -1);
        Solver solver(cfg.spec, o);
        GridSpec g;
        if (points > 0) {
          g = GridSpec{lo, hi, points};
        } else if (o.grid) {
          g = *o.grid;
        } else {
          g = pilot_grid(cfg.spec, cfg.mc.seed, 1000);
        }
        DensityCurve curve = solver.resolve_density(make_grid(g), o.epsilon, threads);
        py::dict d = curve_to_dict(curve);
        if (curve.mass >= 0.9) d["moments"] = moments_from_density(curve, 4);
        return d;
      },
      py::arg("model"), py::arg("lo") = 0.0, py::arg("hi") = 0.0, py::arg("points") = 0,
      py::arg("epsilon") = -1.0, py::arg("threads") = 1, py::arg("tol") = -1.0,
      py::arg("quad_nodes") = -1,
      "Density of the limit model on a grid (defaults to the config grid or a pilot).");

  m.def(
      "mc_spectrum",
      [](const ParsedConfig& cfg, int blow_up, int reps, std::uint64_t seed) {
        const int m_ = blow_up > 0 ? blow_up : cfg.mc.m;
        const int r_ = reps > 0 ? reps : cfg.mc.reps;
        const std::uint64_t s_ = seed ? seed : cfg.mc.seed;
        return empirical_spectrum(cfg.spec, m_, r_, s_).eigenvalues;
      },
      py::arg("model"), py::arg("m") = 0, py::arg("reps") = 0, py::arg("seed") = 0,
      "Pooled sorted eigenvalues of the blown-up finite model.");

  m.def(
      "ks_distance",
      [](const ParsedConfig& cfg, const std::vector<double>& eigenvalues, double lo, double hi,
         int points, double epsilon) {
        SolveOptions o = options_from_kwargs(cfg, epsilon, -1, -1, -1, -1);
        Solver solver(cfg.spec, o);
        GridSpec g = points > 0 ? GridSpec{lo, hi, points}
                                : (o.grid ? *o.grid : pilot_grid(cfg.spec, cfg.mc.seed, 1000));
        DensityCurve curve = solver.resolve_density(make_grid(g), o.epsilon, 1);
        EmpiricalSpectrum emp;
        emp.eigenvalues = eigenvalues;
        std::sort(emp.eigenvalues.begin(), emp.eigenvalues.end());
        return ks_distance(emp, curve);
      },
      py::arg("model"), py::arg("eigenvalues"), py::arg("lo") = 0.0, py::arg("hi") = 0.0,
      py::arg("points") = 0, py::arg("epsilon") = -1.0,
      "Kolmogorov-Smirnov distance between a sample and the solver curve.");

  m.def("ncp2_count", [](int n) { return ncp2_count(n); }, py::arg("n"));
  m.def("catalan", [](int n) { return catalan(n); }, py::arg("n"));
  m.def(
      "pairings_count", [](int n) { return pair_partitions(n).size(); }, py::arg("n"));
  m.def(
      "circular_word_moment",
      [](const std::string& word) {
        std::vector<bool> w;
        for (char c : word) {
          if (c == '1')
            w.push_back(false);
          else if (c == '*')
            w.push_back(true);
          else if (c != ' ' && c != ',')
            fail(Errc::BadArgument, "word must use characters '1' and '*'");
        }
        return circular_word_moment(w);
      },
      py::arg("word"), "Moment of a circular-element word such as '1**1'.");

  m.attr("__version__") = "0.1.0";
}

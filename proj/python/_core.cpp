#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rsdfo/errors.hpp"
#include "rsdfo/experiments.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/geometry.hpp"
#include "rsdfo/specfun.hpp"

namespace py = pybind11;
using namespace rsdfo;

namespace {

Variant variant_of(const std::string& s) { return parse_variant(s); }

py::dict formula_dict(const FormulaResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["method"] = std::string(to_string(r.method));
  d["p"] = r.p;
  d["d"] = r.d;
  d["abs_error"] = r.estimated_abs_error;
  return d;
}

py::dict estimate_dict(const DecreaseEstimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  d["n_sims"] = e.n_sims;
  d["p"] = e.p;
  d["d"] = e.d;
  d["variant"] = std::string(to_string(e.variant));
  d["seed"] = e.seed;
  return d;
}

Reduction reduction_of(const std::string& s) {
  if (s == "reduced") return Reduction::reduced;
  if (s == "full-basis") return Reduction::full_basis;
  throw std::invalid_argument("reduction must be 'reduced' or 'full-basis'");
}

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expected-decrease formulas, Monte Carlo estimates and the random-subspace optimizer";
  m.attr("__version__") = std::string(kVersion);
  m.attr("MAX_QUADRATURE_DEPTH") = kMaxQuadratureDepth;

  py::register_exception<Unsupported>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
  py::register_exception<ObjectiveError>(m, "ObjectiveError", PyExc_RuntimeError);

  m.def("log_gamma", &log_gamma, py::arg("x"));
  m.def("gamma_half_ratio", [](std::int64_t d) { return gamma_half_ratio(d).value; }, py::arg("d"),
        "Gamma(d/2) / Gamma(d/2 + 1/2).");
  m.def("integral_I", [](std::int64_t p, double tol) {
          const auto r = integral_I(p, tol);
          return py::make_tuple(r.value, r.abs_error);
        },
        py::arg("p"), py::arg("tol") = 1e-10, "Returns (value, estimated absolute error).");

  m.def("expected_decrease",
        [](const std::string& v, std::int64_t p, std::int64_t d) {
          return formula_dict(expected_decrease(variant_of(v), p, d));
        },
        py::arg("variant"), py::arg("p"), py::arg("d"));
  m.def("per_evaluation",
        [](const std::string& v, std::int64_t p, std::int64_t d, bool opportunistic) {
          const Variant var = variant_of(v);
          if (opportunistic && var != Variant::ds) {
            throw std::invalid_argument("opportunistic polling applies to ds only");
          }
          return formula_dict(var == Variant::ds ? per_evaluation_ds(p, d, opportunistic)
                                                 : per_evaluation_mb(p, d));
        },
        py::arg("variant"), py::arg("p"), py::arg("d"), py::arg("opportunistic") = false);
  m.def("parallel_per_work",
        [](const std::string& v, std::int64_t p, std::int64_t d, std::int64_t cores) {
          return formula_dict(parallel_per_work(p, d, cores, variant_of(v)));
        },
        py::arg("variant"), py::arg("p"), py::arg("d"), py::arg("cores"));
  m.def("asymptotic_decrease",
        [](const std::string& v, std::int64_t p, std::int64_t d) {
          return formula_dict(asymptotic_decrease(p, d, variant_of(v)));
        },
        py::arg("variant"), py::arg("p"), py::arg("d"));

  m.def("estimate",
        [](const std::string& v, std::int64_t p, std::int64_t d, std::int64_t n_sims,
           std::uint64_t seed, const std::string& reduction) {
          const Variant var = variant_of(v);
          const Reduction red = reduction_of(reduction);
          DecreaseEstimate e;
          {
            py::gil_scoped_release release;
            e = estimate(var, p, d, n_sims, RngStream(seed), red);
          }
          return estimate_dict(e);
        },
        py::arg("variant"), py::arg("p"), py::arg("d"), py::arg("n_sims") = kDefaultSimulations,
        py::arg("seed") = 0, py::arg("reduction") = "reduced");
  m.def("paired_compare",
        [](const std::string& v, std::int64_t p1, std::int64_t p2, std::int64_t d,
           std::int64_t n_sims, std::uint64_t seed) {
          const auto r = paired_compare(variant_of(v), p1, p2, d, n_sims, RngStream(seed));
          return py::make_tuple(r.delta_mean, r.delta_std_error);
        },
        py::arg("variant"), py::arg("p1"), py::arg("p2"), py::arg("d"),
        py::arg("n_sims") = kDefaultSimulations, py::arg("seed") = 0,
        "Per-evaluation E[p1] - E[p2] under common random numbers: (mean, std_error).");

  m.def("sample_stiefel",
        [](std::int64_t d, std::int64_t p, std::uint64_t seed) {
          RngStream rng(seed);
          return Eigen::MatrixXd(sample_stiefel(d, p, rng).columns());
        },
        py::arg("d"), py::arg("p"), py::arg("seed") = 0);

  m.def("optimize",
        [](const std::string& function, Eigen::Index d, Eigen::Index p, const std::string& kind,
           std::uint64_t budget, double initial_step, double expand, double contract,
           double min_step, std::uint64_t seed) {
          DriverConfig cfg;
          cfg.p = p;
          cfg.iteration_kind = parse_iteration_kind(kind);
          cfg.max_evaluations = budget;
          cfg.initial_step = initial_step;
          cfg.expand_factor = expand;
          cfg.contract_factor = contract;
          cfg.min_step = min_step;
          const auto trace = run_optimizer(function, d, cfg, seed);
          py::list out;
          for (const auto& t : trace) {
            py::dict row;
            row["iteration"] = t.iteration;
            row["eval_count"] = t.eval_count;
            row["best_value"] = t.best_value;
            row["step_size"] = t.step_size;
            row["x"] = Eigen::VectorXd(t.iterate);
            out.append(row);
          }
          return out;
        },
        py::arg("function"), py::arg("d"), py::arg("p") = 1, py::arg("kind") = "ds-complete",
        py::arg("budget") = 1000, py::arg("initial_step") = 1.0, py::arg("expand") = 1.0,
        py::arg("contract") = 0.5, py::arg("min_step") = 1e-8, py::arg("seed") = 0);

  m.def("figure_names", &figure_names);
  m.def("figure_csv",
        [](const std::string& name, std::int64_t n_sims, std::uint64_t seed,
           std::vector<std::int64_t> d_values) {
          ExperimentSpec spec = figure_spec(name);
          spec.n_sims = n_sims;
          spec.seed = seed;
          if (!d_values.empty()) spec.d_values = std::move(d_values);
          std::string csv;
          {
            py::gil_scoped_release release;
            csv = rows_csv(run_grid(spec));
          }
          return csv;
        },
        py::arg("name"), py::arg("n_sims") = kDefaultSimulations, py::arg("seed") = 0,
        py::arg("d_values") = std::vector<std::int64_t>{},
        "CSV table for a named figure grid (parallel-sweep excluded).");

  m.def("verify",
        [](std::uint64_t seed, std::int64_t n_sims) {
          VerifyReport report;
          {
            py::gil_scoped_release release;
            report = run_verify(seed, n_sims);
          }
          py::list gates;
          for (const auto& g : report.gates) gates.append(py::make_tuple(g.name, g.passed, g.detail));
          return py::make_tuple(report.all_passed(), gates, rows_csv(report.rows));
        },
        py::arg("seed") = 0, py::arg("n_sims") = kDefaultSimulations,
        "Returns (all_passed, [(gate, passed, detail)], csv).");
}

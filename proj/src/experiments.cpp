#include "rsdfo/experiments.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rsdfo/errors.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/geometry.hpp"
#include "rsdfo/specfun.hpp"

namespace rsdfo {
namespace {

using nlohmann::json;

const std::vector<std::int64_t> kPowerGrid = {8, 16, 32, 64, 128, 256, 512, 1024};
const std::vector<std::int64_t> kVaryPGrid = {1, 2, 3, 4, 5, 10, 20, 50, 100, 200, 500, 1000};
constexpr std::int64_t kVaryPDimension = 1000;
constexpr double kTieTolerance = 1e-12;

std::string per_work_label(std::int64_t cores) {
  return "per-work(" + std::to_string(cores) + ")";
}

bool formula_available(Variant v, std::int64_t p) {
  return v == Variant::mb || p <= kMaxQuadratureDepth;
}

ResultRow mc_row(const DecreaseEstimate& e, std::string metric, double cost) {
  ResultRow r;
  r.variant = e.variant;
  r.d = e.d;
  r.p = e.p;
  r.method = RowMethod::mc;
  r.metric = std::move(metric);
  r.value = e.mean / cost;
  r.std_error = e.std_error / cost;
  r.n_sims = e.n_sims;
  r.seed = e.seed;
  return r;
}

ResultRow formula_row(Variant v, const FormulaResult& f, RowMethod method,
                      std::string metric, double cost) {
  ResultRow r;
  r.variant = v;
  r.d = f.d;
  r.p = f.p;
  r.method = method;
  r.metric = std::move(metric);
  r.value = f.value / cost;
  return r;
}


std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::decrease: return "decrease";
    case OutputKind::per_evaluation: return "per-evaluation";
    case OutputKind::both: return "both";
  }
  return "decrease";
}

OutputKind parse_output_kind(std::string_view s) {
  if (s == "decrease" || s == "per-iteration") return OutputKind::decrease;
  if (s == "per-evaluation") return OutputKind::per_evaluation;
  if (s == "both") return OutputKind::both;
  throw std::invalid_argument("unknown outputs value '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(RowMethod m) noexcept {
  switch (m) {
    case RowMethod::mc: return "mc";
    case RowMethod::exact: return "exact";
    case RowMethod::asymptotic: return "asymptotic";
  }
  return "mc";
}

// ---------------------------------------------------------------- spec

std::vector<std::int64_t> ExperimentSpec::p_grid(std::int64_t d) const {
  std::vector<std::int64_t> ps;
  if (p_rule == PRule::standard) {
    ps = {1, 2, d / 2, d};
  } else {
    ps = p_values;
  }
  std::erase_if(ps, [d](std::int64_t p) { return p < 1 || p > d; });
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

void ExperimentSpec::validate() const {
  if (d_values.empty()) throw InvalidDimension("experiment '" + name + "': no d values");
  for (const auto d : d_values) {
    if (d < 1) throw InvalidDimension("experiment '" + name + "': d must be >= 1");
  }
  if (n_sims < 1) throw InvalidDimension("experiment '" + name + "': n_sims must be >= 1");
  if (p_rule == PRule::fixed_list) {
    if (p_values.empty()) throw InvalidDimension("experiment '" + name + "': empty p list");
    for (const auto p : p_values) {
      if (p < 1) throw InvalidDimension("experiment '" + name + "': p must be >= 1");
      for (const auto d : d_values) {
        if (p > d) {
          throw InvalidDimension("experiment '" + name + "': p=" + std::to_string(p) +
                                 " exceeds d=" + std::to_string(d));
        }
      }
    }
  }
}

json to_json(const ExperimentSpec& spec) {
  json include = json::array();
  if (spec.include_formula) include.push_back("formula");
  if (spec.include_mc) include.push_back("monte-carlo");
  if (spec.include_asymptotic) include.push_back("asymptotic");
  json j = {{"name", spec.name},
            {"variant", std::string(to_string(spec.variant))},
            {"d_values", spec.d_values},
            {"n_sims", spec.n_sims},
            {"seed", spec.seed},
            {"outputs", std::string(to_string(spec.outputs))},
            {"include", include}};
  if (spec.p_rule == PRule::standard) {
    j["p_rule"] = "standard";
  } else {
    j["p_rule"] = spec.p_values;
  }
  return j;
}

ExperimentSpec spec_from_json(const json& j, ExperimentSpec base) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  if (j.contains("name")) base.name = j.at("name").get<std::string>();
  if (j.contains("variant")) base.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("d_values")) base.d_values = j.at("d_values").get<std::vector<std::int64_t>>();
  if (j.contains("p_rule")) {
    const auto& rule = j.at("p_rule");
    if (rule.is_string()) {
      if (rule.get<std::string>() != "standard") {
        throw std::invalid_argument("p_rule must be \"standard\" or a list of integers");
      }
      base.p_rule = PRule::standard;
    } else {
      base.p_rule = PRule::fixed_list;
      base.p_values = rule.get<std::vector<std::int64_t>>();
    }
  }
  if (j.contains("n_sims")) base.n_sims = j.at("n_sims").get<std::int64_t>();
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("outputs")) base.outputs = parse_output_kind(j.at("outputs").get<std::string>());
  if (j.contains("include")) {
    base.include_formula = base.include_mc = base.include_asymptotic = false;
    for (const auto& item : j.at("include")) {
      const auto s = item.get<std::string>();
      if (s == "formula") base.include_formula = true;
      else if (s == "monte-carlo") base.include_mc = true;
      else if (s == "asymptotic") base.include_asymptotic = true;
      else throw std::invalid_argument("unknown include flag '" + s + "'");
    }
  }
  return base;
}

RngStream cell_stream(std::uint64_t seed, Variant v, std::int64_t p, std::int64_t d,
                      Reduction reduction) {
  std::uint64_t key = mix64(v == Variant::ds ? 0x64u : 0x6du);
  key = mix64(key ^ static_cast<std::uint64_t>(p));
  key = mix64(key ^ (static_cast<std::uint64_t>(d) << 1));
  key = mix64(key ^ (reduction == Reduction::reduced ? 0x72u : 0x66u));
  return split_stream(RngStream(seed), key);
}

// ---------------------------------------------------------------- grids

std::vector<ResultRow> run_grid(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::pair<std::string, Metric>> metrics;
  if (spec.outputs != OutputKind::per_evaluation) {
    metrics.emplace_back("per-iteration", Metric::per_iteration);
  }
  if (spec.outputs != OutputKind::decrease) {
    metrics.emplace_back("per-evaluation", Metric::per_evaluation);
  }

  std::vector<ResultRow> rows;
  for (const auto d : spec.d_values) {
    for (const auto p : spec.p_grid(d)) {
      std::optional<DecreaseEstimate> mc;
      if (spec.include_mc) {
        mc = estimate(spec.variant, p, d, spec.n_sims,
                      cell_stream(spec.seed, spec.variant, p, d));
      }
      std::optional<FormulaResult> exact;
      if (spec.include_formula && formula_available(spec.variant, p)) {
        exact = expected_decrease(spec.variant, p, d);
      }
      std::optional<FormulaResult> asym;
      if (spec.include_asymptotic && p <= 2) asym = asymptotic_decrease(p, d, spec.variant);

      for (const auto& [label, metric] : metrics) {
        const double cost =
            metric == Metric::per_iteration ? 1.0 : evaluation_cost(spec.variant, p);
        if (mc) rows.push_back(mc_row(*mc, label, cost));
        if (exact) rows.push_back(formula_row(spec.variant, *exact, RowMethod::exact, label, cost));
        if (asym) {
          rows.push_back(formula_row(spec.variant, *asym, RowMethod::asymptotic, label, cost));
        }
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_figure_ds_vary_d(ExperimentSpec spec) {
  spec.variant = Variant::ds;
  if (spec.d_values.empty()) spec.d_values = kPowerGrid;
  return run_grid(spec);
}

std::vector<ResultRow> run_figure_mb_vary_d(ExperimentSpec spec) {
  spec.variant = Variant::mb;
  if (spec.d_values.empty()) spec.d_values = kPowerGrid;
  return run_grid(spec);
}

std::vector<ResultRow> run_figure_vary_p(Variant v, std::int64_t d,
                                         std::vector<std::int64_t> p_list,
                                         ExperimentSpec spec) {
  if (p_list.empty()) throw InvalidDimension("run_figure_vary_p: empty p list");
  if (*std::max_element(p_list.begin(), p_list.end()) > d) {
    throw InvalidDimension("run_figure_vary_p: p exceeds d=" + std::to_string(d));
  }
  spec.variant = v;
  spec.d_values = {d};
  spec.p_rule = PRule::fixed_list;
  spec.p_values = std::move(p_list);
  return run_grid(spec);
}

std::vector<std::string> figure_names() {
  return {"ds-vary-d",        "ds-vary-p",        "ds-perfev-vary-d", "ds-perfev-vary-p",
          "mb-vary-d",        "mb-vary-p",        "mb-perfev-vary-d", "mb-perfev-vary-p",
          "parallel-sweep"};
}

ExperimentSpec figure_spec(std::string_view name) {
  ExperimentSpec spec;
  spec.name = std::string(name);
  if (name.size() < 3 || (name.substr(0, 3) != "ds-" && name.substr(0, 3) != "mb-")) {
    throw std::invalid_argument("unknown figure '" + std::string(name) + "'");
  }
  spec.variant = parse_variant(name.substr(0, 2));
  std::string_view rest = name.substr(3);
  if (rest.starts_with("perfev-")) {
    spec.outputs = OutputKind::per_evaluation;
    rest.remove_prefix(7);
  }
  if (rest == "vary-d") {
    spec.d_values = kPowerGrid;
    spec.p_rule = PRule::standard;
  } else if (rest == "vary-p") {
    spec.d_values = {kVaryPDimension};
    spec.p_rule = PRule::fixed_list;
    spec.p_values = kVaryPGrid;
  } else {
    throw std::invalid_argument("unknown figure '" + std::string(name) + "'");
  }
  return spec;
}

// ---------------------------------------------------------------- sweeps

std::vector<std::int64_t> sweep_grid(Variant v, std::int64_t d, std::int64_t cores,
                                     std::int64_t p_multiples) {
  if (cores < 1) throw InvalidDimension("sweep_grid: cores must be >= 1");
  if (p_multiples < 1) throw InvalidDimension("sweep_grid: p_multiples must be >= 1");
  const std::int64_t step = v == Variant::mb ? cores : std::max<std::int64_t>(1, cores / 2);
  const std::int64_t top = std::min(d, p_multiples * cores);
  std::vector<std::int64_t> grid;
  for (std::int64_t p = step; p <= top; p += step) grid.push_back(p);
  return grid;
}

SweepResult run_parallel_sweep(Variant v, std::int64_t d,
                               const std::vector<std::int64_t>& cores_list,
                               std::int64_t p_multiples, std::int64_t n_sims,
                               std::uint64_t seed) {
  if (d < 1) throw InvalidDimension("run_parallel_sweep: d must be >= 1");
  SweepResult result;
  for (const auto c : cores_list) {
    const auto grid = sweep_grid(v, d, c, p_multiples);
    if (grid.empty()) {
      throw InvalidDimension("run_parallel_sweep: empty p grid for cores=" + std::to_string(c));
    }
    const std::size_t first_row = result.rows.size();
    for (const auto p : grid) {
      const double cost = parallel_cost(v, p, c);
      if (formula_available(v, p)) {
        result.rows.push_back(
            formula_row(v, expected_decrease(v, p, d), RowMethod::exact, per_work_label(c), cost));
      } else {
        result.rows.push_back(mc_row(estimate(v, p, d, n_sims, cell_stream(seed, v, p, d)),
                                     per_work_label(c), cost));
      }
    }
    SweepArgmax best{c, 0, {}, 0.0};
    for (std::size_t i = first_row; i < result.rows.size(); ++i) {
      if (result.rows[i].value > best.best_value) {
        best.best_value = result.rows[i].value;
        best.best_p = result.rows[i].p;
      }
    }
    for (std::size_t i = first_row; i < result.rows.size(); ++i) {
      if (best.best_value - result.rows[i].value <= kTieTolerance * best.best_value) {
        best.tied_p.push_back(result.rows[i].p);
      }
    }
    result.argmax.push_back(std::move(best));
  }
  return result;
}

// ---------------------------------------------------------------- optimizer

TestProblem make_test_problem(std::string_view name, Eigen::Index d, RngStream& rng) {
  if (d < 1) throw InvalidDimension("make_test_problem: d must be >= 1");
  TestProblem tp;
  if (name == "linear-random-g") {
    Eigen::VectorXd g = sample_unit_vector(d, rng).coords();
    tp.objective = std::make_unique<ObjectiveHandle>(
        d, [g](const Eigen::VectorXd& x) { return g.dot(x); });
    tp.x0 = Eigen::VectorXd::Zero(d);
  } else if (name == "sphere-quadratic") {
    tp.objective = std::make_unique<ObjectiveHandle>(
        d, [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); });
    tp.x0 = Eigen::VectorXd::Ones(d);
  } else if (name == "rosenbrock") {
    if (d < 2) throw InvalidDimension("rosenbrock needs d >= 2");
    tp.objective = std::make_unique<ObjectiveHandle>(d, [](const Eigen::VectorXd& x) {
      double s = 0.0;
      for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = 1.0 - x(i);
        s += 100.0 * a * a + b * b;
      }
      return s;
    });
    tp.x0 = Eigen::VectorXd::Ones(d);
    for (Eigen::Index i = 0; i < d; i += 2) tp.x0(i) = -1.2;
  } else {
    throw std::invalid_argument("unknown test function '" + std::string(name) +
                                "' (expected linear-random-g, sphere-quadratic or rosenbrock)");
  }
  return tp;
}

std::vector<TraceEntry> run_optimizer(std::string_view function, Eigen::Index d,
                                      const DriverConfig& config, std::uint64_t seed) {
  RngStream problem_rng(seed, 0);
  TestProblem tp = make_test_problem(function, d, problem_rng);
  RngStream driver_rng(seed, 1);
  return run_driver(*tp.objective, tp.x0, config, driver_rng);
}

// ---------------------------------------------------------------- output

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "variant,d,p,method,metric,value,std_error,n_sims,seed\n";
  for (const auto& r : rows) {
    os << to_string(r.variant) << ',' << r.d << ',' << r.p << ',' << to_string(r.method)
       << ',' << r.metric << ',' << format_real(r.value) << ',';
    if (r.std_error) os << format_real(*r.std_error);
    os << ',';
    if (r.n_sims) os << *r.n_sims;
    os << ',';
    if (r.seed) os << *r.seed;
    os << '\n';
  }
}

json rows_to_json(const std::vector<ResultRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j = {{"variant", std::string(to_string(r.variant))},
              {"d", r.d},
              {"p", r.p},
              {"method", std::string(to_string(r.method))},
              {"metric", r.metric},
              {"value", r.value},
              {"std_error", r.std_error ? json(*r.std_error) : json(nullptr)},
              {"n_sims", r.n_sims ? json(*r.n_sims) : json(nullptr)},
              {"seed", r.seed ? json(*r.seed) : json(nullptr)}};
    out.push_back(std::move(j));
  }
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace) {
  os << "iteration,eval_count,best_value,step_size\n";
  for (const auto& t : trace) {
    os << t.iteration << ',' << t.eval_count << ',' << format_real(t.best_value) << ','
       << format_real(t.step_size) << '\n';
  }
}

}  // namespace rsdfo

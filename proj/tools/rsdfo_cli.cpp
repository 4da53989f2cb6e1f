// rsdfo: command-line front end for the random-subspace DFO library.
//
//   rsdfo formula --variant ds --p 2 --d 100
//   rsdfo mc --variant mb --p 4 --d 64 --nsims 10000 --seed 0
//   rsdfo figure ds-vary-d --out ds_vary_d.csv
//   rsdfo figure parallel-sweep --variant mb --d 128 --cores 1,2,4,8
//   rsdfo optimize --function sphere-quadratic --d 20 --p 2 --budget 2000
//   rsdfo verify --seed 0

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsdfo/errors.hpp"
#include "rsdfo/experiments.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsdfo;

namespace {

constexpr const char* kOutputDirEnv = "RSDFO_OUTPUT_DIR";

struct OutputOptions {
  std::string out;
  std::string format = "csv";
};

// Resolves --out against RSDFO_OUTPUT_DIR. Empty result means stdout.
fs::path resolve_output(const std::string& out, const std::string& default_name) {
  const char* dir = std::getenv(kOutputDirEnv);
  if (out == "-") return {};
  if (!out.empty()) {
    fs::path p(out);
    if (p.is_relative() && dir && *dir) p = fs::path(dir) / p;
    return p;
  }
  if (dir && *dir) return fs::path(dir) / default_name;
  return {};
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes `payload` to the resolved destination; files get an adjacent
// <name>.manifest.json describing the run.
void emit(const std::string& payload, const OutputOptions& opts, const std::string& stem,
          const json& spec_echo) {
  const fs::path path = resolve_output(opts.out, stem + "." + opts.format);
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << payload;
  const json manifest = {{"spec", spec_echo},
                         {"library_version", std::string(kVersion)},
                         {"timestamp", timestamp_utc()},
                         {"output", path.filename().string()},
                         {"format", opts.format}};
  std::ofstream(path.string() + ".manifest.json") << manifest.dump(2) << '\n';
  std::cerr << "wrote " << path.string() << '\n';
}

std::string render_rows(const std::vector<ResultRow>& rows, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << rows_to_json(rows).dump(2) << '\n';
  } else {
    write_rows_csv(os, rows);
  }
  return os.str();
}

void add_output_flags(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--out", opts.out,
                  "Output path ('-' for stdout); relative paths resolve against $" +
                      std::string(kOutputDirEnv));
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

ResultRow formula_row(Variant v, const FormulaResult& f, RowMethod m, std::string metric) {
  return {v, f.d, f.p, m, std::move(metric), f.value, std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-subspace derivative-free optimization: expected-decrease formulas, "
               "Monte Carlo estimates and the optimizer"};
  app.require_subcommand(1);

  std::string variant_name = "ds";
  std::int64_t p = 1, d = 1, nsims = kDefaultSimulations, cores = 0;
  std::uint64_t seed = 0;
  OutputOptions out_opts;

  // formula
  auto* formula = app.add_subcommand("formula", "Print E, E^F and asymptotic values");
  bool opportunistic = false;
  formula->add_option("--variant", variant_name)->check(CLI::IsMember({"ds", "mb"}));
  formula->add_option("--p", p, "Subspace dimension")->required();
  formula->add_option("--d", d, "Ambient dimension")->required();
  formula->add_option("--cores-model", cores, "Also report per-work value for c cores");
  formula->add_flag("--opportunistic", opportunistic, "Per-evaluation value under opportunistic polling (ds)");
  add_output_flags(formula, out_opts);

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of the expected decrease");
  std::string reduction_name = "reduced";
  mc->add_option("--variant", variant_name)->check(CLI::IsMember({"ds", "mb"}));
  mc->add_option("--p", p)->required();
  mc->add_option("--d", d)->required();
  mc->add_option("--nsims", nsims, "Replicates (default 10000)");
  mc->add_option("--seed", seed, "Seed (default 0)");
  mc->add_option("--reduction", reduction_name)->check(CLI::IsMember({"reduced", "full-basis"}));
  mc->add_option("--cores-model", cores, "Also report per-work value for c cores");
  add_output_flags(mc, out_opts);

  // figure
  auto* figure = app.add_subcommand("figure", "Named reproduction grids");
  std::string figure_name, config_path;
  std::vector<std::int64_t> d_list, p_list, cores_list = {1, 2, 4, 8};
  std::int64_t p_multiples = 100;
  std::string outputs_name;
  auto names = figure_names();
  figure->add_option("name", figure_name, "Figure name")->required()->check(CLI::IsMember(names));
  figure->add_option("--config", config_path, "JSON experiment spec; flags override it");
  figure->add_option("--variant", variant_name)->check(CLI::IsMember({"ds", "mb"}));
  figure->add_option("--d", d_list, "Ambient dimensions (comma separated)")->delimiter(',');
  figure->add_option("--p", p_list, "Subspace dimensions (comma separated)")->delimiter(',');
  figure->add_option("--nsims", nsims);
  figure->add_option("--seed", seed);
  figure->add_option("--outputs", outputs_name)
      ->check(CLI::IsMember({"decrease", "per-evaluation", "both"}));
  figure->add_option("--cores", cores_list, "Core counts for parallel-sweep")->delimiter(',');
  figure->add_option("--cores-model", cores, "Single core count for parallel-sweep");
  figure->add_option("--p-multiples", p_multiples, "parallel-sweep grid length");
  add_output_flags(figure, out_opts);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Run the random-subspace optimizer");
  std::string function_name = "sphere-quadratic", kind_name = "ds-complete";
  DriverConfig config;
  std::int64_t budget = 1000;
  optimize->add_option("--function", function_name)
      ->check(CLI::IsMember({"linear-random-g", "sphere-quadratic", "rosenbrock"}));
  optimize->add_option("--d", d)->required();
  optimize->add_option("--p", p, "Subspace dimension");
  optimize->add_option("--kind", kind_name)
      ->check(CLI::IsMember({"ds-complete", "ds-opportunistic", "mb"}));
  optimize->add_option("--variant", variant_name, "Shorthand: ds = ds-complete, mb = mb")
      ->check(CLI::IsMember({"ds", "mb"}));
  optimize->add_option("--budget", budget, "Maximum function evaluations");
  optimize->add_option("--delta0", config.initial_step);
  optimize->add_option("--expand", config.expand_factor);
  optimize->add_option("--contract", config.contract_factor);
  optimize->add_option("--min-step", config.min_step);
  optimize->add_option("--seed", seed);
  optimize->add_option("--out", out_opts.out, "Trace CSV path ('-' for stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the reproduction gate suite");
  verify->add_option("--seed", seed);
  verify->add_option("--nsims", nsims);
  verify->add_option("--out", out_opts.out, "CSV of the rows behind the gates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Variant variant = parse_variant(variant_name);

    if (*formula) {
      std::vector<ResultRow> rows;
      rows.push_back(formula_row(variant, expected_decrease(variant, p, d), RowMethod::exact,
                                 "per-iteration"));
      const FormulaResult per_eval = variant == Variant::ds ? per_evaluation_ds(p, d, opportunistic)
                                                            : per_evaluation_mb(p, d);
      rows.push_back(formula_row(variant, per_eval, RowMethod::exact, "per-evaluation"));
      if (cores > 0) {
        rows.push_back(formula_row(variant, parallel_per_work(p, d, cores, variant),
                                   RowMethod::exact, "per-work(" + std::to_string(cores) + ")"));
      }
      if (p <= 2) {
        rows.push_back(formula_row(variant, asymptotic_decrease(p, d, variant),
                                   RowMethod::asymptotic, "per-iteration"));
      }
      const json echo = {{"command", "formula"}, {"variant", variant_name}, {"p", p}, {"d", d}};
      emit(render_rows(rows, out_opts.format), out_opts, "formula", echo);
      return 0;
    }

    if (*mc) {
      const Reduction reduction =
          reduction_name == "full-basis" ? Reduction::full_basis : Reduction::reduced;
      const auto e = estimate(variant, p, d, nsims, cell_stream(seed, variant, p, d, reduction),
                              reduction);
      std::vector<ResultRow> rows;
      const auto add = [&](std::string metric, double cost) {
        rows.push_back({variant, d, p, RowMethod::mc, std::move(metric), e.mean / cost,
                        e.std_error / cost, e.n_sims, seed});
      };
      add("per-iteration", 1.0);
      add("per-evaluation", evaluation_cost(variant, p));
      if (cores > 0) {
        add("per-work(" + std::to_string(cores) + ")", parallel_cost(variant, p, cores));
      }
      const json echo = {{"command", "mc"}, {"variant", variant_name}, {"p", p}, {"d", d},
                         {"n_sims", nsims}, {"seed", seed}, {"reduction", reduction_name}};
      emit(render_rows(rows, out_opts.format), out_opts, "mc", echo);
      return 0;
    }

    if (*figure) {
      if (figure_name == "parallel-sweep") {
        const std::int64_t sweep_d = d_list.empty() ? (variant == Variant::mb ? 128 : 64) : d_list.front();
        if (cores > 0) cores_list = {cores};
        const auto sweep = run_parallel_sweep(variant, sweep_d, cores_list, p_multiples, nsims, seed);
        for (const auto& a : sweep.argmax) {
          std::cerr << "cores=" << a.cores << " argmax p=" << a.best_p;
          if (a.tied_p.size() > 1) {
            std::cerr << " (tied:";
            for (const auto tp : a.tied_p) std::cerr << ' ' << tp;
            std::cerr << ')';
          }
          std::cerr << '\n';
        }
        const json echo = {{"command", "figure"}, {"name", figure_name},
                           {"variant", variant_name}, {"d", sweep_d},
                           {"cores", cores_list}, {"p_multiples", p_multiples},
                           {"n_sims", nsims}, {"seed", seed}};
        emit(render_rows(sweep.rows, out_opts.format), out_opts, figure_name, echo);
        return 0;
      }
      ExperimentSpec spec = figure_spec(figure_name);
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file " + config_path);
        spec = spec_from_json(json::parse(in), spec);
      }
      if (figure->count("--d")) spec.d_values = d_list;
      if (figure->count("--p")) {
        spec.p_rule = PRule::fixed_list;
        spec.p_values = p_list;
      }
      if (figure->count("--nsims")) spec.n_sims = nsims;
      if (figure->count("--seed")) spec.seed = seed;
      if (figure->count("--variant")) spec.variant = variant;
      if (!outputs_name.empty()) spec = spec_from_json({{"outputs", outputs_name}}, spec);
      const auto rows = run_grid(spec);
      emit(render_rows(rows, out_opts.format), out_opts, figure_name, to_json(spec));
      return 0;
    }

    if (*optimize) {
      config.p = p;
      config.max_evaluations = static_cast<std::uint64_t>(std::max<std::int64_t>(0, budget));
      config.iteration_kind = parse_iteration_kind(kind_name);
      if (optimize->count("--variant") && !optimize->count("--kind")) {
        config.iteration_kind = variant == Variant::ds ? IterationKind::ds_complete : IterationKind::mb;
      }
      const auto trace = run_optimizer(function_name, d, config, seed);
      std::ostringstream os;
      write_trace_csv(os, trace);
      const json echo = {{"command", "optimize"}, {"function", function_name}, {"d", d},
                         {"p", p}, {"kind", std::string(to_string(config.iteration_kind))},
                         {"budget", budget}, {"delta0", config.initial_step},
                         {"expand", config.expand_factor}, {"contract", config.contract_factor},
                         {"min_step", config.min_step}, {"seed", seed}};
      out_opts.format = "csv";
      emit(os.str(), out_opts, "optimize", echo);
      return 0;
    }

    if (*verify) {
      const auto report = run_verify(seed, nsims);
      for (const auto& g : report.gates) {
        std::cerr << (g.passed ? "PASS " : "FAIL ") << g.name << " (" << g.detail << ")\n";
      }
      std::ostringstream os;
      write_rows_csv(os, report.rows);
      out_opts.format = "csv";
      const json echo = {{"command", "verify"}, {"seed", seed}, {"n_sims", nsims}};
      emit(os.str(), out_opts, "verify", echo);
      return report.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "rsdfo: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

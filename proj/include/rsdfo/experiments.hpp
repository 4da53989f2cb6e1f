#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rsdfo/dfo.hpp"
#include "rsdfo/montecarlo.hpp"
#include "rsdfo/types.hpp"

namespace rsdfo {

inline constexpr std::string_view kVersion = "0.1.0";

enum class RowMethod { mc, exact, asymptotic };
std::string_view to_string(RowMethod m) noexcept;

/// One line of every experiment table.
struct ResultRow {
  Variant variant = Variant::ds;
  std::int64_t d = 0;
  std::int64_t p = 0;
  RowMethod method = RowMethod::mc;
  std::string metric;  ///< per-iteration | per-evaluation | per-work(c)
  double value = 0.0;
  std::optional<double> std_error;  ///< present iff method == mc
  std::optional<std::int64_t> n_sims;
  std::optional<std::uint64_t> seed;
};

enum class PRule { fixed_list, standard };
enum class OutputKind { decrease, per_evaluation, both };

struct ExperimentSpec {
  std::string name = "custom";
  Variant variant = Variant::ds;
  std::vector<std::int64_t> d_values;
  PRule p_rule = PRule::standard;   ///< standard: {1, 2, d/2, d}
  std::vector<std::int64_t> p_values;  ///< used with PRule::fixed_list
  std::int64_t n_sims = kDefaultSimulations;
  std::uint64_t seed = 0;
  OutputKind outputs = OutputKind::decrease;
  bool include_formula = true;
  bool include_mc = true;
  bool include_asymptotic = true;

  /// Sorted, de-duplicated subspace dimensions used for ambient dimension d.
  std::vector<std::int64_t> p_grid(std::int64_t d) const;
  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
/// Fields missing from `j` keep the values already present in `base`.
ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base = {});

/// Stream used for the Monte Carlo cell (variant, p, d) of a run with `seed`.
/// Equal cells in different tables see the same replicates.
RngStream cell_stream(std::uint64_t seed, Variant v, std::int64_t p, std::int64_t d,
                      Reduction reduction = Reduction::reduced);

/// Rows in grid order: d, then p, then metric, then method (mc, exact, asymptotic).
std::vector<ResultRow> run_grid(const ExperimentSpec& spec);

std::vector<ResultRow> run_figure_ds_vary_d(ExperimentSpec spec);
std::vector<ResultRow> run_figure_mb_vary_d(ExperimentSpec spec);
std::vector<ResultRow> run_figure_vary_p(Variant v, std::int64_t d,
                                         std::vector<std::int64_t> p_list,
                                         ExperimentSpec spec);

std::vector<std::string> figure_names();
/// Default grid for a named figure (ds-vary-d, mb-perfev-vary-p, ...).
/// parallel-sweep is handled by run_parallel_sweep.
ExperimentSpec figure_spec(std::string_view name);

struct SweepArgmax {
  std::int64_t cores;
  std::int64_t best_p;
  std::vector<std::int64_t> tied_p;  ///< all p within 1e-12 relative of the max
  double best_value;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<SweepArgmax> argmax;
};

/// Grid of subspace dimensions probed for `cores` in a parallel sweep:
/// multiples of c (mb) or of max(1, c/2) (ds) up to p_multiples * c, capped at d.
std::vector<std::int64_t> sweep_grid(Variant v, std::int64_t d, std::int64_t cores,
                                     std::int64_t p_multiples);

/// Expected decrease per unit of parallel work over sweep_grid(). Uses the
/// formulas where available and the reduced estimator (method mc) otherwise.
SweepResult run_parallel_sweep(Variant v, std::int64_t d,
                               const std::vector<std::int64_t>& cores_list,
                               std::int64_t p_multiples, std::int64_t n_sims = kDefaultSimulations,
                               std::uint64_t seed = 0);

/// Named benchmark objectives: linear-random-g, sphere-quadratic, rosenbrock.
struct TestProblem {
  std::unique_ptr<ObjectiveHandle> objective;
  Eigen::VectorXd x0;
};
TestProblem make_test_problem(std::string_view name, Eigen::Index d, RngStream& rng);

std::vector<TraceEntry> run_optimizer(std::string_view function, Eigen::Index d,
                                      const DriverConfig& config, std::uint64_t seed);

/// Serialization. Reals use 17 significant digits; the CSV header and column
/// order are fixed.
std::string format_real(double v);
void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace);

struct GateResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyReport {
  std::vector<ResultRow> rows;
  std::vector<GateResult> gates;
  bool all_passed() const;
};

/// Runs the full reproduction gate suite with the given seed.
VerifyReport run_verify(std::uint64_t seed = 0, std::int64_t n_sims = kDefaultSimulations);

}  // namespace rsdfo

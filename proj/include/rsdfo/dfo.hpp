#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rsdfo/geometry.hpp"
#include "rsdfo/rng.hpp"
#include "rsdfo/types.hpp"

namespace rsdfo {

/// Black-box objective f: R^d -> R with an evaluation counter.
///
/// The counter is atomic so that poll points may be evaluated concurrently
/// when the wrapped function is reentrant.
class ObjectiveHandle {
 public:
  using Function = std::function<double(const Eigen::VectorXd&)>;

  ObjectiveHandle(Eigen::Index dimension, Function f);

  ObjectiveHandle(const ObjectiveHandle&) = delete;
  ObjectiveHandle& operator=(const ObjectiveHandle&) = delete;

  /// Evaluates f(x) and increments the counter. Throws ObjectiveError on a
  /// dimension mismatch or a non-finite value.
  double evaluate(const Eigen::VectorXd& x) const;

  Eigen::Index dimension() const noexcept { return dimension_; }
  std::uint64_t eval_count() const noexcept { return count_.load(); }

 private:
  Eigen::Index dimension_;
  Function f_;
  mutable std::atomic<std::uint64_t> count_{0};
};

/// z -> f(x + B z), the objective restricted to the affine subspace through
/// `base_point` spanned by the basis columns.
class SubspaceRestriction {
 public:
  SubspaceRestriction(const ObjectiveHandle& objective, Eigen::VectorXd base_point,
                      SubspaceBasis basis,
                      std::optional<double> base_value = std::nullopt);

  /// f(x + B z); always calls the objective.
  double value(const Eigen::VectorXd& z) const;

  /// f(x), evaluated once and cached afterwards.
  double base_value() const;
  bool base_value_cached() const noexcept { return base_value_.has_value(); }

  Eigen::VectorXd lift(const Eigen::VectorXd& z) const;

  Eigen::Index subspace_dim() const noexcept { return basis_.subspace_dim(); }
  const SubspaceBasis& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& base_point() const noexcept { return base_point_; }
  const ObjectiveHandle& objective() const noexcept { return *objective_; }

 private:
  const ObjectiveHandle* objective_;
  Eigen::VectorXd base_point_;
  SubspaceBasis basis_;
  mutable std::optional<double> base_value_;
};

struct IterationOutcome {
  Eigen::VectorXd step;        ///< z* in subspace coordinates
  std::uint64_t new_evaluations = 0;
  double achieved_decrease = 0.0;  ///< f(x^k) - f(x^{k+1}) >= 0
  double value = 0.0;              ///< f(x^{k+1})
};

/// Forward-difference simplex gradient with sample matrix delta * I_p:
/// component i is (f|_p(z + delta e_i) - f|_p(z)) / delta.
///
/// `value_at_z` supplies f|_p(z) when already known; at z = 0 the cached
/// base value of the restriction is used.
Eigen::VectorXd simplex_gradient(const SubspaceRestriction& restriction,
                                 const Eigen::VectorXd& z, double delta,
                                 std::optional<double> value_at_z = std::nullopt);

/// One direct-search iteration from z = 0, polling +-delta e_i in the order
/// e_1, -e_1, e_2, -e_2, ... Complete polling keeps the first strict best;
/// opportunistic polling returns at the first strict improvement.
IterationOutcome ds_iteration(const SubspaceRestriction& restriction, double delta,
                              PollMode mode = PollMode::complete);

/// One model-based iteration from z = 0: step delta along the negative
/// normalized simplex gradient and keep the better of incumbent and trial.
/// With p = 1 and a descent direction of +e_1 the poll value is reused.
IterationOutcome mb_iteration(const SubspaceRestriction& restriction, double delta);

enum class IterationKind { ds_complete, ds_opportunistic, mb };

struct DriverConfig {
  Eigen::Index p = 1;
  double initial_step = 1.0;
  double expand_factor = 1.0;
  double contract_factor = 0.5;
  std::uint64_t max_evaluations = 1000;
  double min_step = 1e-8;
  IterationKind iteration_kind = IterationKind::ds_complete;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct TraceEntry {
  std::uint64_t iteration;
  Eigen::VectorXd iterate;
  double step_size;          ///< step size to be used from this iterate
  std::uint64_t eval_count;  ///< evaluations spent by this run so far
  double best_value;
};

/// Random-subspace driver: each iteration draws a Haar basis, runs one
/// subspace iteration, moves to x + B z*, then expands the step on strict
/// decrease and contracts it otherwise. Stops once the evaluation budget is
/// spent or the step falls below min_step. The starting point is always
/// evaluated, so the trace holds at least one entry.
std::vector<TraceEntry> run_driver(const ObjectiveHandle& objective,
                                   const Eigen::VectorXd& x0,
                                   const DriverConfig& config, RngStream& rng);

std::string_view to_string(IterationKind k) noexcept;
IterationKind parse_iteration_kind(std::string_view s);

}  // namespace rsdfo

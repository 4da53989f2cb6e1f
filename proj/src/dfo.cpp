#include "rsdfo/dfo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rsdfo/errors.hpp"

namespace rsdfo {
namespace {

constexpr double kDegenerateGradient = 1e-14;

struct SimplexSample {
  Eigen::VectorXd gradient;
  Eigen::VectorXd poll_values;  // f|_p(z + delta e_i)
  std::uint64_t evaluations = 0;
};

SimplexSample sample_simplex(const SubspaceRestriction& r, const Eigen::VectorXd& z,
                             double delta, double value_at_z) {
  const Eigen::Index p = r.subspace_dim();
  SimplexSample s;
  s.gradient.resize(p);
  s.poll_values.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::VectorXd zi = z;
    zi(i) += delta;
    s.poll_values(i) = r.value(zi);
    s.gradient(i) = (s.poll_values(i) - value_at_z) / delta;
  }
  s.evaluations = static_cast<std::uint64_t>(p);
  return s;
}

void check_delta(double delta, const char* who) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError(std::string(who) + ": delta must be positive and finite");
  }
}

}  // namespace

ObjectiveHandle::ObjectiveHandle(Eigen::Index dimension, Function f)
    : dimension_(dimension), f_(std::move(f)) {
  if (dimension_ < 1) throw InvalidDimension("ObjectiveHandle: dimension must be >= 1");
  if (!f_) throw std::invalid_argument("ObjectiveHandle: empty function");
}

double ObjectiveHandle::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != dimension_) {
    throw ObjectiveError("objective expects dimension " + std::to_string(dimension_) +
                         ", got " + std::to_string(x.size()));
  }
  count_.fetch_add(1, std::memory_order_relaxed);
  const double v = f_(x);
  if (!std::isfinite(v)) {
    throw ObjectiveError("objective returned a non-finite value (" + std::to_string(v) +
                         ") at evaluation " + std::to_string(count_.load()));
  }
  return v;
}

SubspaceRestriction::SubspaceRestriction(const ObjectiveHandle& objective,
                                         Eigen::VectorXd base_point, SubspaceBasis basis,
                                         std::optional<double> base_value)
    : objective_(&objective),
      base_point_(std::move(base_point)),
      basis_(std::move(basis)),
      base_value_(base_value) {
  if (base_point_.size() != objective.dimension() ||
      basis_.ambient_dim() != objective.dimension()) {
    throw InvalidDimension("SubspaceRestriction: base point, basis and objective "
                           "dimensions differ");
  }
}

Eigen::VectorXd SubspaceRestriction::lift(const Eigen::VectorXd& z) const {
  if (z.size() != basis_.subspace_dim()) {
    throw InvalidDimension("SubspaceRestriction: z has the wrong dimension");
  }
  return base_point_ + basis_.columns() * z;
}

double SubspaceRestriction::value(const Eigen::VectorXd& z) const {
  return objective_->evaluate(lift(z));
}

double SubspaceRestriction::base_value() const {
  if (!base_value_) base_value_ = objective_->evaluate(base_point_);
  return *base_value_;
}

Eigen::VectorXd simplex_gradient(const SubspaceRestriction& restriction,
                                 const Eigen::VectorXd& z, double delta,
                                 std::optional<double> value_at_z) {
  check_delta(delta, "simplex_gradient");
  if (z.size() != restriction.subspace_dim()) {
    throw InvalidDimension("simplex_gradient: z has the wrong dimension");
  }
  double fz;
  if (value_at_z) {
    fz = *value_at_z;
  } else if (z.isZero(0.0)) {
    fz = restriction.base_value();
  } else {
    fz = restriction.value(z);
  }
  return sample_simplex(restriction, z, delta, fz).gradient;
}

IterationOutcome ds_iteration(const SubspaceRestriction& restriction, double delta,
                              PollMode mode) {
  check_delta(delta, "ds_iteration");
  const Eigen::Index p = restriction.subspace_dim();
  IterationOutcome out;
  if (!restriction.base_value_cached()) out.new_evaluations += 1;
  const double incumbent = restriction.base_value();
  out.step = Eigen::VectorXd::Zero(p);
  out.value = incumbent;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (const double sign : {1.0, -1.0}) {
      z(i) = sign * delta;
      const double v = restriction.value(z);
      ++out.new_evaluations;
      if (v < out.value) {
        out.value = v;
        out.step = z;
      }
      z(i) = 0.0;
      if (mode == PollMode::opportunistic && out.value < incumbent) {
        out.achieved_decrease = incumbent - out.value;
        return out;
      }
    }
  }
  out.achieved_decrease = incumbent - out.value;
  return out;
}

IterationOutcome mb_iteration(const SubspaceRestriction& restriction, double delta) {
  check_delta(delta, "mb_iteration");
  const Eigen::Index p = restriction.subspace_dim();
  IterationOutcome out;
  if (!restriction.base_value_cached()) out.new_evaluations += 1;
  const double incumbent = restriction.base_value();
  out.step = Eigen::VectorXd::Zero(p);
  out.value = incumbent;

  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(p);
  const SimplexSample sample = sample_simplex(restriction, origin, delta, incumbent);
  out.new_evaluations += sample.evaluations;

  const double norm = sample.gradient.norm();
  if (norm < kDegenerateGradient) return out;

  const Eigen::VectorXd trial = -delta * (sample.gradient / norm);
  double trial_value;
  if (p == 1 && trial(0) > 0.0) {
    // The trial point is delta * e_1, already evaluated for the gradient.
    trial_value = sample.poll_values(0);
  } else {
    trial_value = restriction.value(trial);
    ++out.new_evaluations;
  }
  if (trial_value < incumbent) {
    out.step = trial;
    out.value = trial_value;
    out.achieved_decrease = incumbent - trial_value;
  }
  return out;
}

void DriverConfig::validate() const {
  if (p < 1) throw InvalidDimension("DriverConfig: p must be >= 1");
  if (!(initial_step > 0.0)) throw std::invalid_argument("DriverConfig: initial_step must be > 0");
  if (!(expand_factor >= 1.0)) throw std::invalid_argument("DriverConfig: expand_factor must be >= 1");
  if (!(contract_factor > 0.0 && contract_factor < 1.0)) {
    throw std::invalid_argument("DriverConfig: contract_factor must lie in (0, 1)");
  }
  if (!(min_step > 0.0)) throw std::invalid_argument("DriverConfig: min_step must be > 0");
}

std::vector<TraceEntry> run_driver(const ObjectiveHandle& objective,
                                   const Eigen::VectorXd& x0, const DriverConfig& config,
                                   RngStream& rng) {
  config.validate();
  const Eigen::Index d = objective.dimension();
  if (x0.size() != d) {
    throw InvalidDimension("run_driver: x0 has dimension " + std::to_string(x0.size()) +
                           " but the objective expects " + std::to_string(d));
  }
  if (config.p > d) throw InvalidDimension("run_driver: p exceeds the problem dimension");

  const std::uint64_t start = objective.eval_count();
  const auto used = [&] { return objective.eval_count() - start; };

  Eigen::VectorXd x = x0;
  double fx = objective.evaluate(x);
  double delta = config.initial_step;
  std::vector<TraceEntry> trace;
  trace.push_back({0, x, delta, used(), fx});

  for (std::uint64_t k = 1; used() < config.max_evaluations && delta >= config.min_step;
       ++k) {
    SubspaceRestriction restriction(objective, x, sample_stiefel(d, config.p, rng), fx);
    IterationOutcome out;
    switch (config.iteration_kind) {
      case IterationKind::ds_complete:
        out = ds_iteration(restriction, delta, PollMode::complete);
        break;
      case IterationKind::ds_opportunistic:
        out = ds_iteration(restriction, delta, PollMode::opportunistic);
        break;
      case IterationKind::mb:
        out = mb_iteration(restriction, delta);
        break;
    }
    if (out.value < fx) {
      x = restriction.lift(out.step);
      fx = out.value;
      delta *= config.expand_factor;
    } else {
      delta *= config.contract_factor;
    }
    trace.push_back({k, x, delta, used(), fx});
  }
  return trace;
}

std::string_view to_string(IterationKind k) noexcept {
  switch (k) {
    case IterationKind::ds_complete: return "ds-complete";
    case IterationKind::ds_opportunistic: return "ds-opportunistic";
    case IterationKind::mb: return "mb";
  }
  return "unknown";
}

IterationKind parse_iteration_kind(std::string_view s) {
  if (s == "ds" || s == "ds-complete") return IterationKind::ds_complete;
  if (s == "ds-opportunistic") return IterationKind::ds_opportunistic;
  if (s == "mb") return IterationKind::mb;
  throw std::invalid_argument("unknown iteration kind '" + std::string(s) +
                              "' (expected ds-complete, ds-opportunistic or mb)");
}

}  // namespace rsdfo

// Reproduction gate suite behind `rsdfo verify`.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rsdfo/experiments.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/geometry.hpp"
#include "rsdfo/specfun.hpp"

namespace rsdfo {
namespace {

using std::numbers::pi;

const std::vector<std::int64_t> kGateGrid = {8, 16, 32, 64, 128, 256, 512, 1024};
constexpr std::int64_t kPairedDimension = 1000;

class GateBuilder {
 public:
  explicit GateBuilder(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      if (failures_++ < 5) detail_ << (detail_.tellp() > 0 ? "; " : "") << what;
    }
    ++checks_;
  }

  GateResult finish() {
    std::ostringstream out;
    out << checks_ << " checks";
    if (!passed_) out << ", " << failures_ << " failed: " << detail_.str();
    return {name_, passed_, out.str()};
  }

 private:
  std::string name_;
  bool passed_ = true;
  int checks_ = 0;
  int failures_ = 0;
  std::ostringstream detail_;
};

std::string cell(Variant v, std::int64_t p, std::int64_t d) {
  std::ostringstream s;
  s << to_string(v) << "[p=" << p << ",d=" << d << "]";
  return s.str();
}

ResultRow row_of(const DecreaseEstimate& e) {
  return {e.variant, e.d, e.p, RowMethod::mc, "per-iteration", e.mean, e.std_error,
          e.n_sims, e.seed};
}

ResultRow row_of(Variant v, const FormulaResult& f) {
  return {v, f.d, f.p, RowMethod::exact, "per-iteration", f.value, std::nullopt,
          std::nullopt, std::nullopt};
}

void formula_vs_mc(GateBuilder& gate, VerifyReport& report, Variant v, std::int64_t p,
                   std::int64_t d, std::int64_t n, std::uint64_t seed) {
  const auto mc = estimate(v, p, d, n, cell_stream(seed, v, p, d));
  const auto ex = expected_decrease(v, p, d);
  report.rows.push_back(row_of(mc));
  report.rows.push_back(row_of(v, ex));
  gate.check(std::abs(mc.mean - ex.value) <= 3.0 * mc.std_error,
             cell(v, p, d) + " mc=" + format_real(mc.mean) + " exact=" + format_real(ex.value));
}

GateResult gate_closed_form_ds(VerifyReport& report, std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("closed-form-ds");
  for (const auto d : kGateGrid)
    for (const std::int64_t p : {1, 2}) formula_vs_mc(gate, report, Variant::ds, p, d, n, seed);
  return gate.finish();
}

GateResult gate_closed_form_mb(VerifyReport& report, std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("closed-form-mb");
  for (const auto d : kGateGrid) {
    for (const std::int64_t p : {std::int64_t{1}, std::int64_t{2}, d / 2, d}) {
      formula_vs_mc(gate, report, Variant::mb, p, d, n, seed);
    }
    gate.check(expected_decrease_mb(d, d).value == 1.0, cell(Variant::mb, d, d) + " != 1");
  }
  return gate.finish();
}

GateResult gate_quadrature_constants() {
  GateBuilder gate("quadrature-constants");
  gate.check(std::abs(integral_I(2).value - 1.0 / std::sqrt(2.0)) <= 1e-10, "I(2) != 1/sqrt(2)");
  for (const auto d : kGateGrid) {
    const double r = gamma_half_ratio(d).value;
    gate.check(std::abs(expected_decrease_ds(3, d).value / r - 0.938) <= 0.001,
               "E_DS[3," + std::to_string(d) + "]/ratio");
    gate.check(std::abs(expected_decrease_ds(4, d).value / r - 1.036) <= 0.001,
               "E_DS[4," + std::to_string(d) + "]/ratio");
  }
  return gate.finish();
}

GateResult gate_ratio_identities(std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("ratio-identities");
  auto dims = kGateGrid;
  dims.push_back(kPairedDimension);
  for (const auto d : dims) {
    const auto close = [&](double a, double b, const char* what) {
      gate.check(std::abs(a - b) <= 1e-10 * std::abs(b), std::string(what) + " d=" + std::to_string(d));
    };
    close(expected_decrease_ds(2, d).value / expected_decrease_ds(1, d).value, std::sqrt(2.0),
          "E_DS[2]/E_DS[1]");
    close(expected_decrease_mb(2, d).value / expected_decrease_mb(1, d).value, pi / 2.0,
          "E_MB[2]/E_MB[1]");
    close(per_evaluation_ds(2, d).value / per_evaluation_ds(1, d).value, std::sqrt(2.0) / 2.0,
          "E_DS^F[2]/E_DS^F[1]");
    close(per_evaluation_mb(2, d).value / per_evaluation_mb(1, d).value, pi / 4.0,
          "E_MB^F[2]/E_MB^F[1]");
  }
  struct Case {
    Variant v;
    Metric m;
    double target;
    const char* what;
  };
  const Case cases[] = {
      {Variant::ds, Metric::per_iteration, std::sqrt(2.0), "paired ds ratio"},
      {Variant::mb, Metric::per_iteration, pi / 2.0, "paired mb ratio"},
      {Variant::ds, Metric::per_evaluation, std::sqrt(2.0) / 2.0, "paired ds per-eval ratio"},
      {Variant::mb, Metric::per_evaluation, pi / 4.0, "paired mb per-eval ratio"},
  };
  std::uint64_t k = 0;
  for (const auto& c : cases) {
    const auto r = paired_ratio(c.v, 1, 2, kPairedDimension, n,
                                split_stream(RngStream(seed), 0x7261u + k++), c.m);
    gate.check(std::abs(r.ratio - c.target) <= 3.0 * r.std_error,
               std::string(c.what) + "=" + format_real(r.ratio));
  }
  return gate.finish();
}

GateResult gate_monotonicity(std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("per-evaluation-monotonicity");
  for (const std::int64_t d : {64, 1024}) {
    for (std::int64_t p = 1; p < kMaxQuadratureDepth; ++p) {
      gate.check(per_evaluation_ds(p, d).value > per_evaluation_ds(p + 1, d).value,
                 "ds p=" + std::to_string(p) + " d=" + std::to_string(d));
    }
    gate.check(per_evaluation_mb(1, d).value > per_evaluation_mb(2, d).value,
               "mb p=1 d=" + std::to_string(d));
    for (std::int64_t p = 2; p < std::min<std::int64_t>(d - 1, 64); ++p) {
      gate.check(per_evaluation_mb(p, d).value > per_evaluation_mb(p + 1, d).value,
                 "mb p=" + std::to_string(p) + " d=" + std::to_string(d));
    }
  }
  std::uint64_t k = 0;
  for (const Variant v : {Variant::ds, Variant::mb}) {
    for (std::int64_t p = 1; p <= 5; ++p) {
      const auto diff = paired_compare(v, p, p + 1, kPairedDimension, n,
                                       split_stream(RngStream(seed), 0x6d6fu + k++));
      gate.check(diff.delta_mean > 3.0 * diff.delta_std_error,
                 "paired " + std::string(to_string(v)) + " p=" + std::to_string(p));
    }
  }
  return gate.finish();
}

GateResult gate_separability(std::uint64_t seed) {
  GateBuilder gate("separability");
  RngStream rng = split_stream(RngStream(seed), 0x736570u);
  const auto uniform_int = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int t = 0; t < 100; ++t) {
    const std::int64_t p1 = uniform_int(1, kMaxQuadratureDepth);
    const std::int64_t p2 = uniform_int(1, kMaxQuadratureDepth);
    const std::int64_t lo = std::max(p1, p2);
    const std::int64_t d1 = uniform_int(lo, 2048);
    const std::int64_t d2 = uniform_int(lo, 2048);
    for (const Variant v : {Variant::ds, Variant::mb}) {
      const double lhs = expected_decrease(v, p1, d1).value * expected_decrease(v, p2, d2).value;
      const double rhs = expected_decrease(v, p1, d2).value * expected_decrease(v, p2, d1).value;
      gate.check(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs),
                 cell(v, p1, d1) + "x" + cell(v, p2, d2));
    }
  }
  return gate.finish();
}

GateResult gate_asymptotics() {
  GateBuilder gate("asymptotics");
  for (const std::int64_t d : {100, 128, 256, 500, 512, 1000, 1024, 10000, 1000000}) {
    for (const Variant v : {Variant::ds, Variant::mb}) {
      for (const std::int64_t p : {1, 2}) {
        const double exact = expected_decrease(v, p, d).value;
        const double asym = asymptotic_decrease(p, d, v).value;
        gate.check(std::abs(asym - exact) / exact < 0.01, cell(v, p, d));
      }
    }
  }
  return gate.finish();
}

GateResult gate_basis_invariance(VerifyReport& report, std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("basis-invariance");
  const std::pair<std::int64_t, std::int64_t> cells[] = {{1, 16}, {4, 16}, {8, 64}, {32, 64}};
  for (const auto& [p, d] : cells) {
    for (const Variant v : {Variant::ds, Variant::mb}) {
      const auto full = estimate(v, p, d, n, cell_stream(seed, v, p, d, Reduction::full_basis),
                                 Reduction::full_basis);
      const auto reduced = estimate(v, p, d, n, cell_stream(seed, v, p, d), Reduction::reduced);
      report.rows.push_back(row_of(full));
      const double se = std::hypot(full.std_error, reduced.std_error);
      gate.check(std::abs(full.mean - reduced.mean) <= 3.0 * se,
                 cell(v, p, d) + " full=" + format_real(full.mean) +
                     " reduced=" + format_real(reduced.mean));
    }
  }
  return gate.finish();
}

GateResult gate_parallel_sweeps(VerifyReport& report, std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("parallel-sweeps");
  const auto ds = run_parallel_sweep(Variant::ds, 64, {2, 4, 8}, 100, n, seed);
  for (const auto& a : ds.argmax) {
    gate.check(a.best_p == a.cores / 2, "ds c=" + std::to_string(a.cores) +
                                            " argmax p=" + std::to_string(a.best_p));
  }
  const auto mb = run_parallel_sweep(Variant::mb, 128, {1, 2, 4, 8}, 100, n, seed);
  for (const auto& a : mb.argmax) {
    gate.check(a.best_p == a.cores, "mb c=" + std::to_string(a.cores) +
                                        " argmax p=" + std::to_string(a.best_p));
    if (a.cores == 2) {
      gate.check(a.tied_p == std::vector<std::int64_t>{2, 4}, "mb c=2 tie between p=2 and p=4");
    }
  }
  report.rows.insert(report.rows.end(), ds.rows.begin(), ds.rows.end());
  report.rows.insert(report.rows.end(), mb.rows.begin(), mb.rows.end());
  return gate.finish();
}

GateResult gate_optimizer(std::uint64_t seed, std::int64_t n) {
  GateBuilder gate("optimizer-linear");
  RngStream rng = split_stream(RngStream(seed), 0x6f7074u);
  constexpr std::int64_t d = 32;
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t p = 1 + static_cast<std::int64_t>(rng.next_u64() % 8);
    const double delta = 0.5 + 1.5 * rng.uniform();
    const Eigen::VectorXd g = sample_unit_vector(d, rng).coords();
    const ObjectiveHandle f(d, [&g](const Eigen::VectorXd& x) { return g.dot(x); });
    const SubspaceBasis basis = sample_stiefel(d, p, rng);
    const Eigen::VectorXd projected = basis.columns().transpose() * g;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);

    const SubspaceRestriction r(f, x0, basis, 0.0);
    const auto ds = ds_iteration(r, delta);
    gate.check(std::abs(ds.achieved_decrease - projected.cwiseAbs().maxCoeff() * delta) <= 1e-12,
               "ds decrease trial " + std::to_string(trial));
    gate.check(ds.new_evaluations == static_cast<std::uint64_t>(2 * p), "ds evaluation count");

    const auto mb = mb_iteration(r, delta);
    gate.check(std::abs(mb.achieved_decrease - projected.norm() * delta) <= 1e-12,
               "mb decrease trial " + std::to_string(trial));
    if (p >= 2) {
      gate.check(mb.new_evaluations == static_cast<std::uint64_t>(p + 1), "mb evaluation count");
    }
  }
  // p = 1 model-based steps reuse the poll value half of the time.
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const Eigen::VectorXd g = sample_unit_vector(d, rng).coords();
    const ObjectiveHandle f(d, [&g](const Eigen::VectorXd& x) { return g.dot(x); });
    const SubspaceRestriction r(f, Eigen::VectorXd::Zero(d), sample_stiefel(d, 1, rng), 0.0);
    const double evals = static_cast<double>(mb_iteration(r, 1.0).new_evaluations);
    sum += evals;
    sum_sq += evals * evals;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double se = std::sqrt(std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0)) / nn);
  gate.check(std::abs(mean - 1.5) <= 3.0 * se, "p=1 mb average evaluations " + format_real(mean));
  return gate.finish();
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const auto& g) { return g.passed; });
}

VerifyReport run_verify(std::uint64_t seed, std::int64_t n_sims) {
  VerifyReport report;
  report.gates.push_back(gate_closed_form_ds(report, seed, n_sims));
  report.gates.push_back(gate_closed_form_mb(report, seed, n_sims));
  report.gates.push_back(gate_quadrature_constants());
  report.gates.push_back(gate_ratio_identities(seed, n_sims));
  report.gates.push_back(gate_monotonicity(seed, n_sims));
  report.gates.push_back(gate_separability(seed));
  report.gates.push_back(gate_asymptotics());
  report.gates.push_back(gate_basis_invariance(report, seed, n_sims));
  report.gates.push_back(gate_parallel_sweeps(report, seed, n_sims));
  report.gates.push_back(gate_optimizer(seed, n_sims));
  return report;
}

}  // namespace rsdfo

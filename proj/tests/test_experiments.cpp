#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "rsdfo/errors.hpp"
#include "rsdfo/experiments.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/specfun.hpp"

using namespace rsdfo;

namespace {

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.variant = Variant::ds;
  s.d_values = {8, 16};
  s.n_sims = 2000;
  s.seed = 9;
  s.outputs = OutputKind::both;
  return s;
}

}  // namespace

TEST_CASE("format_real keeps 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(std::stod(format_real(M_PI)) == M_PI);
}

TEST_CASE("CSV schema") {
  const auto rows = run_grid(small_spec());
  const std::string text = csv(rows);
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line == "variant,d,p,method,metric,value,std_error,n_sims,seed");
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(n == rows.size());

  for (const auto& r : rows) {
    CHECK(r.value > 0.0);
    CHECK(r.value <= 1.0);
    CHECK(r.std_error.has_value() == (r.method == RowMethod::mc));
    CHECK(r.p <= r.d);
  }
  CHECK(csv(run_grid(small_spec())) == text);
}

TEST_CASE("grid order and p rule") {
  auto spec = small_spec();
  CHECK(spec.p_grid(16) == std::vector<std::int64_t>{1, 2, 8, 16});
  CHECK(spec.p_grid(2) == std::vector<std::int64_t>{1, 2});
  spec.p_rule = PRule::fixed_list;
  spec.p_values = {4, 1, 4, 64};
  CHECK(spec.p_grid(16) == std::vector<std::int64_t>{1, 4});

  const auto rows = run_grid(small_spec());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK((rows[i - 1].d < rows[i].d || (rows[i - 1].d == rows[i].d && rows[i - 1].p <= rows[i].p)));
  }
}

TEST_CASE("MC rows agree with exact rows") {
  const auto rows = run_grid(small_spec());
  int pairs = 0;
  for (const auto& mc : rows) {
    if (mc.method != RowMethod::mc) continue;
    for (const auto& ex : rows) {
      if (ex.method == RowMethod::exact && ex.d == mc.d && ex.p == mc.p && ex.metric == mc.metric) {
        ++pairs;
        CHECK(std::abs(mc.value - ex.value) <= 3 * *mc.std_error);
      }
    }
  }
  CHECK(pairs > 0);
}

TEST_CASE("spec JSON round trip") {
  auto spec = small_spec();
  spec.name = "round";
  spec.p_rule = PRule::fixed_list;
  spec.p_values = {1, 3};
  const auto back = spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));

  ExperimentSpec base;
  base.seed = 123;
  const auto merged = spec_from_json(nlohmann::json{{"n_sims", 50}}, base);
  CHECK(merged.seed == 123);
  CHECK(merged.n_sims == 50);

  ExperimentSpec broken;
  broken.d_values = {4};
  broken.p_rule = PRule::fixed_list;
  broken.p_values = {};
  CHECK_THROWS(broken.validate());
}

TEST_CASE("named figures") {
  const auto names = figure_names();
  CHECK(std::set<std::string>(names.begin(), names.end()).count("ds-perfev-vary-p") == 1);
  CHECK(names.size() == 9);
  CHECK_THROWS(figure_spec("no-such-figure"));

  auto spec = figure_spec("ds-vary-d");
  spec.n_sims = 500;
  spec.d_values = {8, 1024};
  const auto rows = run_figure_ds_vary_d(spec);
  bool saw_exact = false, saw_big_mc = false;
  for (const auto& r : rows) {
    if (r.d == 8 && r.p == 1 && r.method == RowMethod::exact && r.metric == "per-iteration") {
      saw_exact = true;
      CHECK(std::abs(r.value - gamma_half_ratio(8).value / std::sqrt(M_PI)) < 1e-14);
    }
    if (r.d == 1024 && r.p == 1024 && r.method == RowMethod::mc) {
      saw_big_mc = true;
      CHECK(r.value > 0.0);
      CHECK(r.value <= 1.0);
      CHECK(*r.std_error > 0.0);
    }
  }
  CHECK(saw_exact);
  CHECK(saw_big_mc);

  auto mb = figure_spec("mb-vary-p");
  mb.n_sims = 200;
  const auto mb_rows = run_figure_vary_p(Variant::mb, 1000, {1000}, mb);
  for (const auto& r : mb_rows) {
    if (r.method == RowMethod::exact) CHECK(std::abs(r.value - 1.0) < 1e-12);
    if (r.method == RowMethod::mc) CHECK(std::abs(r.value - 1.0) < 1e-12);
  }
}

TEST_CASE("parallel sweeps") {
  CHECK(sweep_grid(Variant::mb, 128, 4, 100).back() == 128);
  CHECK(sweep_grid(Variant::ds, 64, 4, 3) == std::vector<std::int64_t>{2, 4, 6, 8, 10, 12});

  const auto mb = run_parallel_sweep(Variant::mb, 128, {1, 2, 4, 8}, 100, 500, 0);
  for (const auto& a : mb.argmax) {
    CAPTURE(a.cores);
    CHECK(a.best_p == (a.cores == 2 ? 2 : a.cores));
    if (a.cores == 2) CHECK(a.tied_p == std::vector<std::int64_t>{2, 4});
  }
  const auto ds = run_parallel_sweep(Variant::ds, 64, {2, 4, 8}, 2, 500, 0);
  for (const auto& a : ds.argmax) CHECK(a.best_p == a.cores / 2);
  for (const auto& r : ds.rows) CHECK(r.metric.rfind("per-work(", 0) == 0);
}

TEST_CASE("run_optimizer") {
  DriverConfig cfg;
  cfg.max_evaluations = 0;
  CHECK(run_optimizer("sphere-quadratic", 5, cfg, 1).size() == 1);

  cfg.max_evaluations = 200;
  const auto lin = run_optimizer("linear-random-g", 50, cfg, 2);
  for (std::size_t i = 1; i < lin.size(); ++i) CHECK(lin[i].best_value < lin[i - 1].best_value);

  cfg.p = 2;
  cfg.max_evaluations = 2000;
  const auto sq = run_optimizer("sphere-quadratic", 20, cfg, 3);
  CHECK(sq.back().best_value < 0.01 * sq.front().best_value);

  const auto a = run_optimizer("rosenbrock", 4, cfg, 7);
  const auto b = run_optimizer("rosenbrock", 4, cfg, 7);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("iteration,eval_count,best_value,step_size\n", 0) == 0);

  CHECK_THROWS(run_optimizer("himmelblau", 4, cfg, 0));
}

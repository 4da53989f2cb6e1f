#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rsdfo/errors.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/montecarlo.hpp"
#include "rsdfo/specfun.hpp"

using namespace rsdfo;
using std::numbers::pi;

namespace {

bool within(const DecreaseEstimate& e, double exact, double k = 3.0) {
  return std::abs(e.mean - exact) <= k * e.std_error;
}

double combined(const DecreaseEstimate& a, const DecreaseEstimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

}  // namespace

TEST_CASE("estimate") {
  SUBCASE("mb with p = d is exactly one") {
    for (std::int64_t d : {1, 3, 64}) {
      for (auto red : {Reduction::reduced, Reduction::full_basis}) {
        const auto e = estimate(Variant::mb, d, d, 500, RngStream(1), red);
        CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(e.std_error < 1e-14);
      }
    }
  }
  SUBCASE("ds, p = 1, d = 2 matches 2/pi") {
    const auto e = estimate(Variant::ds, 1, 2, 1000000, RngStream(3));
    CHECK(within(e, 2.0 / pi));
    CHECK(e.std_error < 1e-3);
  }
  SUBCASE("ds, p = 2, d = 100") {
    const auto e = estimate(Variant::ds, 2, 100, 10000, RngStream(4));
    CHECK(within(e, std::sqrt(2.0) / std::sqrt(pi) * gamma_half_ratio(100).value));
  }
  SUBCASE("agreement with quadrature formulas") {
    for (std::int64_t p : {3, 5, 8}) {
      const auto e = estimate(Variant::ds, p, 20, 40000, RngStream(100 + p));
      CAPTURE(p);
      CHECK(within(e, expected_decrease_ds(p, 20).value));
    }
  }
  SUBCASE("metadata and errors") {
    const auto e = estimate(Variant::mb, 2, 9, 100, RngStream(77, 3));
    CHECK(e.n_sims == 100);
    CHECK(e.p == 2);
    CHECK(e.d == 9);
    CHECK(e.variant == Variant::mb);
    CHECK(e.seed == 77);
    CHECK(e.mean > 0.0);
    CHECK(e.mean <= 1.0);
    CHECK_THROWS_AS(estimate(Variant::ds, 3, 2, 10, RngStream(0)), InvalidDimension);
    CHECK_THROWS(estimate(Variant::ds, 1, 2, 0, RngStream(0)));
  }
}

TEST_CASE("estimate is deterministic and chunk-stable") {
  const RngStream rng(2024);
  const auto a = estimate(Variant::ds, 4, 50, 5000, rng);
  const auto b = estimate(Variant::ds, 4, 50, 5000, rng);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const auto c = estimate(Variant::ds, 4, 50, 5000, RngStream(2025));
  CHECK(a.mean != c.mean);
  // A prefix of chunks is shared: the first kReplicateChunk replicates agree.
  const auto head = estimate(Variant::ds, 4, 50, kReplicateChunk, rng);
  const auto head2 = estimate(Variant::ds, 4, 50, kReplicateChunk, rng);
  CHECK(head.mean == head2.mean);
}

TEST_CASE("estimate_per_evaluation") {
  const RngStream rng(8);
  const double ds1 = estimate(Variant::ds, 1, 8, 4000, rng).mean;
  const double mb1 = estimate(Variant::mb, 1, 8, 4000, rng).mean;
  const double mb3 = estimate(Variant::mb, 3, 8, 4000, rng).mean;
  CHECK(estimate_per_evaluation(Variant::ds, 1, 8, 4000, rng).mean == ds1 / 2.0);
  CHECK(estimate_per_evaluation(Variant::mb, 1, 8, 4000, rng).mean == doctest::Approx(mb1 / 1.5).epsilon(1e-15));
  CHECK(estimate_per_evaluation(Variant::mb, 3, 8, 4000, rng).mean == doctest::Approx(mb3 / 4.0).epsilon(1e-15));
  const auto opp = estimate_per_evaluation(Variant::ds, 1, 8, 4000, rng, PollMode::opportunistic);
  CHECK(opp.mean == doctest::Approx(ds1 / 1.5).epsilon(1e-15));
}

TEST_CASE("reduced and full-basis estimates agree") {
  for (auto v : {Variant::ds, Variant::mb}) {
    for (auto [p, d] : {std::pair<std::int64_t, std::int64_t>{1, 16}, {4, 16}, {8, 64}}) {
      const auto red = estimate(v, p, d, 10000, RngStream(10, 1));
      const auto full = estimate(v, p, d, 10000, RngStream(10, 2), Reduction::full_basis);
      CAPTURE(p);
      CAPTURE(d);
      CHECK(std::abs(red.mean - full.mean) <= 3 * combined(red, full));
    }
  }
}

TEST_CASE("paired comparisons") {
  const RngStream rng(5);
  const auto same = paired_compare(Variant::ds, 3, 3, 50, 1000, rng);
  CHECK(same.delta_mean == 0.0);
  CHECK(same.delta_std_error == 0.0);

  const auto ds = paired_compare(Variant::ds, 1, 2, 1000, 10000, rng);
  CHECK(ds.delta_mean > 3 * ds.delta_std_error);
  const auto mb = paired_compare(Variant::mb, 2, 3, 1000, 10000, rng);
  CHECK(mb.delta_mean > 3 * mb.delta_std_error);

  const auto r_ds = paired_ratio(Variant::ds, 1, 2, 1000, 10000, rng);
  CHECK(std::abs(r_ds.ratio - std::sqrt(2.0)) <= 3 * r_ds.std_error);
  const auto r_mb = paired_ratio(Variant::mb, 1, 2, 1000, 10000, rng);
  CHECK(std::abs(r_mb.ratio - pi / 2.0) <= 3 * r_mb.std_error);
  const auto f_mb = paired_ratio(Variant::mb, 1, 2, 1000, 10000, rng, Metric::per_evaluation);
  CHECK(std::abs(f_mb.ratio - pi / 4.0) <= 3 * f_mb.std_error);
}

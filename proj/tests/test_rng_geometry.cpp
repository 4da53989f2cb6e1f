#include <doctest.h>

#include <cmath>
#include <vector>

#include "rsdfo/errors.hpp"
#include "rsdfo/geometry.hpp"
#include "rsdfo/rng.hpp"
#include "stats_util.hpp"

using namespace rsdfo;
using rsdfo::testing::ks_critical_1pct;
using rsdfo::testing::ks_statistic;
using rsdfo::testing::mean_se;

TEST_CASE("RngStream is deterministic per (seed, stream)") {
  RngStream a(1, 0), b(1, 0), c(1, 1), e(2, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    if (i == 0) {
      CHECK(x != c());
      CHECK(x != e());
    }
  }
}

TEST_CASE("split_stream") {
  const RngStream root(1);
  SUBCASE("same k gives identical sequences") {
    RngStream s0 = split_stream(root, 0), t0 = split_stream(root, 0);
    for (int i = 0; i < 32; ++i) CHECK(s0() == t0());
  }
  SUBCASE("distinct k differ in the first output") {
    RngStream s0 = split_stream(root, 0), s1 = split_stream(root, 1);
    CHECK(s0() != s1());
  }
  SUBCASE("independent of the parent's position") {
    RngStream advanced(1);
    for (int i = 0; i < 10; ++i) advanced();
    RngStream a = split_stream(advanced, 5), b = split_stream(root, 5);
    CHECK(a() == b());
  }
  SUBCASE("100 substreams, one normal each, mean near zero") {
    const RngStream seed42(42);
    double sum = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      RngStream s = split_stream(seed42, k);
      sum += s.normal();
    }
    CHECK(std::abs(sum / 100.0) < 0.4);
  }
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(9);
  std::vector<double> u, z;
  for (int i = 0; i < 100000; ++i) {
    u.push_back(rng.uniform());
    z.push_back(rng.normal());
  }
  CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);
  CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
  const auto mu = mean_se(u);
  CHECK(std::abs(mu.mean - 0.5) < 4 * mu.se);
  const auto mz = mean_se(z);
  CHECK(std::abs(mz.mean) < 4 * mz.se);
  double var = 0.0;
  for (double x : z) var += x * x;
  CHECK(var / z.size() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sample_unit_vector") {
  SUBCASE("d = 1 is a sign") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      RngStream rng(s);
      const double x = sample_unit_vector(1, rng).coords()(0);
      CHECK((x == 1.0 || x == -1.0));
    }
  }
  SUBCASE("d = 2 has unit norm") {
    RngStream rng(7);
    const auto v = sample_unit_vector(2, rng).coords();
    CHECK(std::abs(v.squaredNorm() - 1.0) < 1e-12);
  }
  SUBCASE("d = 0 is rejected") {
    RngStream rng(0);
    CHECK_THROWS_AS(sample_unit_vector(0, rng), InvalidDimension);
  }
  SUBCASE("coordinate means vanish in d = 1000") {
    RngStream rng(3);
    constexpr int n = 10000;
    constexpr int d = 1000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) {
      const auto v = sample_unit_vector(d, rng).coords();
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
      sum += v;
    }
    const double bound = 4.0 / std::sqrt(static_cast<double>(n) * d);
    CHECK((sum / n).cwiseAbs().maxCoeff() < bound * 1.5);
    // The 1000 coordinate means are ~N(0, 1/(n d)); 4 sigma bounds nearly all.
    int outside = 0;
    for (int i = 0; i < d; ++i) outside += std::abs(sum(i) / n) >= bound;
    CHECK(outside <= 1);
  }
}

TEST_CASE("sample_stiefel") {
  SUBCASE("square case is orthogonal") {
    RngStream rng(5);
    const auto b = sample_stiefel(3, 3, rng);
    const Eigen::MatrixXd q = b.columns();
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("p = 1 is a unit vector") {
    RngStream rng(11);
    const auto b = sample_stiefel(5, 1, rng);
    CHECK(b.columns().rows() == 5);
    CHECK(std::abs(b.columns().col(0).norm() - 1.0) < 1e-12);
  }
  SUBCASE("invalid dimensions") {
    RngStream rng(0);
    CHECK_THROWS_AS(sample_stiefel(3, 4, rng), InvalidDimension);
    CHECK_THROWS_AS(sample_stiefel(3, 0, rng), InvalidDimension);
  }
  SUBCASE("orthonormality defect up to d = 2048") {
    RngStream rng(21);
    const std::pair<int, int> sizes[] = {{1, 1}, {2, 2}, {17, 5}, {64, 64}, {300, 300},
                                         {2048, 3}, {2048, 64}};
    for (const auto& [d, p] : sizes) {
      CAPTURE(d);
      CAPTURE(p);
      CHECK(sample_stiefel(d, p, rng).orthonormality_defect() < 1e-10);
    }
  }
  SUBCASE("SubspaceBasis rejects non-orthonormal columns") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 0, 1;
    CHECK_THROWS_AS(SubspaceBasis{m}, DomainError);
  }
}

TEST_CASE("||B^T g||_inf matches max of p sphere coordinates (d=16, p=4)") {
  RngStream rng(16);
  std::vector<double> lhs, rhs;
  for (int i = 0; i < 10000; ++i) {
    const auto g = sample_unit_vector(16, rng).coords();
    const auto b = sample_stiefel(16, 4, rng);
    lhs.push_back((b.columns().transpose() * g).cwiseAbs().maxCoeff());
    rhs.push_back(sample_unit_vector(16, rng).coords().head(4).cwiseAbs().maxCoeff());
  }
  const auto a = mean_se(lhs), c = mean_se(rhs);
  CHECK(std::abs(a.mean - c.mean) <= 3.0 * std::hypot(a.se, c.se));
}

TEST_CASE("Haar invariance under a fixed rotation (KS at n = 1e4)") {
  constexpr int d = 12, p = 3, n = 10000;
  RngStream qrng(77);
  const Eigen::MatrixXd q = sample_stiefel(d, d, qrng).columns();
  RngStream rng(78);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  g(0) = 0.6;
  g(1) = 0.8;
  std::vector<double> plain, rotated;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd b = sample_stiefel(d, p, rng).columns();
    plain.push_back((b.transpose() * g).norm());
    const Eigen::MatrixXd b2 = sample_stiefel(d, p, rng).columns();
    rotated.push_back(((q * b2).transpose() * g).norm());
  }
  CHECK(ks_statistic(plain, rotated) < ks_critical_1pct(n, n));
}

TEST_CASE("Q and Q^T have the same first-column marginal (KS at n = 1e4)") {
  constexpr int d = 6, n = 10000;
  RngStream rng(90);
  std::vector<double> q_entries, qt_entries;
  for (int i = 0; i < n; ++i) {
    q_entries.push_back(sample_stiefel(d, d, rng).columns()(0, 0));
    const Eigen::MatrixXd qt = sample_stiefel(d, d, rng).columns().transpose();
    qt_entries.push_back(qt(0, 0));
  }
  CHECK(ks_statistic(q_entries, qt_entries) < ks_critical_1pct(n, n));
}

TEST_CASE("sign correction: diagonal of B's leading block is not biased") {
  // Without sign correction the (0,0) entry of the QR factor is always
  // negative for Householder QR; Haar requires a symmetric distribution.
  RngStream rng(4);
  int positive = 0;
  for (int i = 0; i < 4000; ++i) positive += sample_stiefel(5, 2, rng).columns()(0, 0) > 0.0;
  CHECK(std::abs(positive - 2000) < 4 * std::sqrt(1000.0));
}

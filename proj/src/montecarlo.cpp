#include "rsdfo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "rsdfo/errors.hpp"
#include "rsdfo/formulas.hpp"
#include "rsdfo/geometry.hpp"

namespace rsdfo {
namespace {

// Running first and second moments of a pair (x, y); single-valued
// estimates leave y at zero.
struct Moments {
  double n = 0.0;
  double mean_x = 0.0, mean_y = 0.0;
  double m2x = 0.0, m2y = 0.0, cxy = 0.0;

  void add(double x, double y) {
    n += 1.0;
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    m2x += dx * (x - mean_x);
    m2y += dy * (y - mean_y);
    cxy += dx * (y - mean_y);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    const double w = n * o.n / total;
    m2x += o.m2x + dx * dx * w;
    m2y += o.m2y + dy * dy * w;
    cxy += o.cxy + dx * dy * w;
    mean_x += dx * o.n / total;
    mean_y += dy * o.n / total;
    n = total;
  }

  double var_x() const { return n > 1.0 ? m2x / (n - 1.0) : 0.0; }
  double var_y() const { return n > 1.0 ? m2y / (n - 1.0) : 0.0; }
  double cov() const { return n > 1.0 ? cxy / (n - 1.0) : 0.0; }
};

// Runs `replicate(rng, buffers) -> pair<double,double>` n times in chunks
// and merges the chunk moments in chunk order.
template <typename Replicate>
Moments run_chunks(std::int64_t n, const RngStream& rng, Replicate replicate) {
  const std::int64_t chunks = (n + kReplicateChunk - 1) / kReplicateChunk;
  std::vector<Moments> partial(static_cast<std::size_t>(chunks));
  const auto work = [&](std::int64_t first, std::int64_t stride) {
    for (std::int64_t c = first; c < chunks; c += stride) {
      RngStream sub = split_stream(rng, static_cast<std::uint64_t>(c));
      const std::int64_t begin = c * kReplicateChunk;
      const std::int64_t end = std::min(n, begin + kReplicateChunk);
      Moments& m = partial[static_cast<std::size_t>(c)];
      auto rep = replicate;  // per-thread scratch buffers
      for (std::int64_t k = begin; k < end; ++k) {
        const auto [x, y] = rep(sub);
        m.add(x, y);
      }
    }
  };
  const std::int64_t hw = std::max<std::int64_t>(1, std::thread::hardware_concurrency());
  const std::int64_t workers = std::min(hw, chunks);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  Moments total;
  for (const auto& m : partial) total.merge(m);
  return total;
}

void check_args(std::int64_t p, std::int64_t d, std::int64_t n_sims, const char* who) {
  if (d < 1 || p < 1 || p > d) {
    throw InvalidDimension(std::string(who) + ": need 1 <= p <= d, got p=" +
                           std::to_string(p) + " d=" + std::to_string(d));
  }
  if (n_sims < 1) throw InvalidDimension(std::string(who) + ": n_sims must be >= 1");
}

// Decrease of one replicate given |g_i| for the subspace coordinates.
double decrease_from(Variant v, std::int64_t p, std::int64_t d,
                     const Eigen::Ref<const Eigen::VectorXd>& coords) {
  if (v == Variant::ds) return std::min(1.0, coords.cwiseAbs().maxCoeff());
  if (p == d) return 1.0;  // the subspace is all of R^d and ||g|| = 1
  return std::min(1.0, coords.norm());
}

// Reduced replicate: a uniform point on S^{d-1}, of which the first
// `keep` coordinates are returned through `out`.
class SphereHead {
 public:
  SphereHead(std::int64_t d, std::int64_t keep) : z_(d), keep_(keep) {}

  const Eigen::VectorXd& draw(RngStream& rng) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < z_.size(); ++i) z_(i) = rng.normal();
      norm = z_.norm();
    } while (norm < 1e-300);
    head_ = z_.head(keep_) / norm;
    return head_;
  }

 private:
  Eigen::VectorXd z_;
  Eigen::VectorXd head_;
  std::int64_t keep_;
};

double metric_cost(Variant v, std::int64_t p, Metric metric) {
  return metric == Metric::per_iteration ? 1.0 : evaluation_cost(v, p);
}

}  // namespace

DecreaseEstimate estimate(Variant variant, std::int64_t p, std::int64_t d,
                          std::int64_t n_sims, const RngStream& rng, Reduction reduction) {
  check_args(p, d, n_sims, "estimate");
  Moments m;
  if (reduction == Reduction::reduced) {
    m = run_chunks(n_sims, rng, [variant, p, d, head = SphereHead(d, p)](
                                    RngStream& r) mutable {
      return std::pair{decrease_from(variant, p, d, head.draw(r)), 0.0};
    });
  } else {
    m = run_chunks(n_sims, rng, [variant, p, d](RngStream& r) {
      const UnitVector g = sample_unit_vector(d, r);
      const SubspaceBasis b = sample_stiefel(d, p, r);
      const Eigen::VectorXd projected = b.columns().transpose() * g.coords();
      return std::pair{decrease_from(variant, p, d, projected), 0.0};
    });
  }
  DecreaseEstimate e;
  e.mean = m.mean_x;
  e.std_error = std::sqrt(m.var_x() / m.n);
  e.n_sims = n_sims;
  e.p = p;
  e.d = d;
  e.variant = variant;
  e.seed = rng.seed();
  return e;
}

DecreaseEstimate estimate_per_evaluation(Variant variant, std::int64_t p, std::int64_t d,
                                         std::int64_t n_sims, const RngStream& rng,
                                         PollMode mode, Reduction reduction) {
  check_args(p, d, n_sims, "estimate_per_evaluation");
  const bool opportunistic = variant == Variant::ds && mode == PollMode::opportunistic;
  DecreaseEstimate e = estimate(variant, opportunistic ? 1 : p, d, n_sims, rng, reduction);
  const double cost = evaluation_cost(variant, p, mode);
  e.mean /= cost;
  e.std_error /= cost;
  e.p = p;
  return e;
}

namespace {

Moments paired_moments(Variant variant, std::int64_t p1, std::int64_t p2, std::int64_t d,
                       std::int64_t n_sims, const RngStream& rng, Metric metric) {
  const double c1 = metric_cost(variant, p1, metric);
  const double c2 = metric_cost(variant, p2, metric);
  const std::int64_t keep = std::max(p1, p2);
  return run_chunks(n_sims, rng,
                    [=, head = SphereHead(d, keep)](RngStream& r) mutable {
                      const Eigen::VectorXd& g = head.draw(r);
                      return std::pair{decrease_from(variant, p1, d, g.head(p1)) / c1,
                                       decrease_from(variant, p2, d, g.head(p2)) / c2};
                    });
}

}  // namespace

PairedDifference paired_compare(Variant variant, std::int64_t p1, std::int64_t p2,
                                std::int64_t d, std::int64_t n_sims, const RngStream& rng,
                                Metric metric) {
  check_args(p1, d, n_sims, "paired_compare");
  check_args(p2, d, n_sims, "paired_compare");
  if (p1 == p2) return {0.0, 0.0};
  const Moments m = paired_moments(variant, p1, p2, d, n_sims, rng, metric);
  const double var = std::max(0.0, m.var_x() + m.var_y() - 2.0 * m.cov());
  return {m.mean_x - m.mean_y, std::sqrt(var / m.n)};
}

PairedRatio paired_ratio(Variant variant, std::int64_t p1, std::int64_t p2,
                         std::int64_t d, std::int64_t n_sims, const RngStream& rng,
                         Metric metric) {
  check_args(p1, d, n_sims, "paired_ratio");
  check_args(p2, d, n_sims, "paired_ratio");
  const Moments m = paired_moments(variant, p1, p2, d, n_sims, rng, metric);
  const double r = m.mean_y / m.mean_x;
  const double var =
      std::max(0.0, m.var_y() - 2.0 * r * m.cov() + r * r * m.var_x()) /
      (m.n * m.mean_x * m.mean_x);
  return {r, std::sqrt(var)};
}

}  // namespace rsdfo

#pragma once

#include <cstdint>

#include "rsdfo/rng.hpp"
#include "rsdfo/types.hpp"

namespace rsdfo {

inline constexpr std::int64_t kDefaultSimulations = 10000;

/// Replicates are generated in fixed-size chunks; chunk c draws from
/// split_stream(rng, c). Results do not depend on the thread count.
inline constexpr std::int64_t kReplicateChunk = 1024;

/// How each replicate is drawn.
///  - full_basis: fresh g on S^{d-1} and B on V_{p,d}; D = ||B^T g||_inf (ds)
///    or ||B^T g||_2 (mb).
///  - reduced: fresh g on S^{d-1} only; D is computed from its first p
///    coordinates, which has the same distribution.
enum class Reduction { full_basis, reduced };

enum class Metric { per_iteration, per_evaluation };

struct DecreaseEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_sims = 0;
  std::int64_t p = 0;
  std::int64_t d = 0;
  Variant variant = Variant::ds;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of E[p, d] with its standard error.
/// Pure in (rng identity, arguments); `rng` itself is not advanced.
DecreaseEstimate estimate(Variant variant, std::int64_t p, std::int64_t d,
                          std::int64_t n_sims, const RngStream& rng,
                          Reduction reduction = Reduction::reduced);

/// estimate() divided by the per-iteration evaluation cost (2p, p+1, or 3/2
/// for mb with p = 1 and for opportunistic polling, which behaves as p = 1).
DecreaseEstimate estimate_per_evaluation(Variant variant, std::int64_t p, std::int64_t d,
                                         std::int64_t n_sims, const RngStream& rng,
                                         PollMode mode = PollMode::complete,
                                         Reduction reduction = Reduction::reduced);

struct PairedDifference {
  double delta_mean;
  double delta_std_error;
};

/// E^F[p1, d] - E^F[p2, d] with common random numbers: both subspace
/// dimensions see the same reduced g per replicate.
PairedDifference paired_compare(Variant variant, std::int64_t p1, std::int64_t p2,
                                std::int64_t d, std::int64_t n_sims, const RngStream& rng,
                                Metric metric = Metric::per_evaluation);

struct PairedRatio {
  double ratio;
  double std_error;  ///< delta-method standard error of the ratio of means
};

/// mean(D[p2]) / mean(D[p1]) under common random numbers, in the chosen metric.
PairedRatio paired_ratio(Variant variant, std::int64_t p1, std::int64_t p2,
                         std::int64_t d, std::int64_t n_sims, const RngStream& rng,
                         Metric metric = Metric::per_iteration);

}  // namespace rsdfo

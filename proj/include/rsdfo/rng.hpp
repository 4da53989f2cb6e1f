#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rsdfo {

/// Reproducible random stream identified by (seed, stream index).
///
/// The generator is xoshiro256** whose 256-bit state is derived from the
/// pair (seed, stream) through SplitMix64. Two streams with the same
/// identity produce the same sequence; substreams are obtained with
/// split_stream() and never share state with their parent.
///
/// Satisfies std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }
  std::uint64_t next_u64() noexcept;

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Standard normal deviate (Marsaglia polar method).
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Independent, reproducible child stream number k of `rng`.
///
/// Depends only on the identity (seed, stream) of `rng`, not on how many
/// values have already been drawn from it.
RngStream split_stream(const RngStream& rng, std::uint64_t k);

/// SplitMix64 finalizer; exposed for hashing experiment cells into stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace rsdfo

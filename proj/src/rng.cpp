#include "rsdfo/rng.hpp"

#include <bit>
#include <cmath>

namespace rsdfo {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Separate SplitMix64 sequences per (seed, stream); the stream id is
  // folded in through a second finalizer round so nearby ids decorrelate.
  std::uint64_t sm = seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL);
  for (auto& word : state_) {
    sm += 0x9e3779b97f4a7c15ULL;
    word = mix64(sm);
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

RngStream split_stream(const RngStream& rng, std::uint64_t k) {
  const std::uint64_t child = mix64(rng.stream() * 0xd1342543de82ef95ULL + mix64(k));
  return RngStream(rng.seed(), child);
}

}  // namespace rsdfo

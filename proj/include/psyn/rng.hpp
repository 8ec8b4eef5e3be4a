#pragma once

#include <cstdint>
#include <random>

namespace psyn {

// Seeded randomness with named sub-streams.
//
// A run's 64-bit seed is split into independent streams by hashing
// (seed, stream id) with SplitMix64. Stream ids used by the pipeline:
//   0      reduced space S, first conditioning attempt
//   1      synthetic sampling
//   a + 1  reduced space S, conditioning attempt a (1-based), a >= 2
// Further ids are free for audits and Monte-Carlo harnesses.

namespace stream {
inline constexpr std::uint64_t kReducedSpace = 0;
inline constexpr std::uint64_t kSampling = 1;
inline constexpr std::uint64_t kAuditRecords = 0x4155'4449'5400'0000ULL;
inline constexpr std::uint64_t kEvalDirections = 0x4556'414c'0000'0000ULL;

/// Stream for conditioning attempt `attempt` (1-based).
constexpr std::uint64_t conditioning_attempt(int attempt) {
  return attempt <= 1 ? kReducedSpace : static_cast<std::uint64_t>(attempt) + 1;
}
}  // namespace stream

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(seed ^ splitmix64(stream_id ^ 0x7073796e'00000000ULL));
}

/// mt19937_64 engine plus the few draws the library needs. uniform() and
/// sign() are computed from raw engine output so they do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream_id) : engine_(derive_seed(seed, stream_id)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = engine_();
    __uint128_t prod = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = engine_();
        prod = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  int sign() {
    if (bits_left_ == 0) {
      bits_ = engine_();
      bits_left_ = 64;
    }
    const int s = (bits_ & 1U) != 0U ? 1 : -1;
    bits_ >>= 1;
    --bits_left_;
    return s;
  }

  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

}  // namespace psyn

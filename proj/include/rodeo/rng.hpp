#pragma once
// Counter-based splittable random streams. A stream is keyed by a seed plus
// any number of integer labels, so independent substreams (one per
// trajectory, or one per (step, class) in the ensemble engine) can be opened
// in any order on any worker and still produce identical draws. Pure 64-bit
// integer arithmetic: bitwise reproducible across platforms.

#include <cmath>
#include <cstdint>

namespace rodeo {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(detail::mix64(seed + detail::kGolden)) {}

  RngStream(std::uint64_t seed, std::uint64_t id0) : RngStream(seed) { absorb(id0); }

  RngStream(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1) : RngStream(seed) {
    absorb(id0);
    absorb(id1);
  }

  RngStream(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1, std::uint64_t id2)
      : RngStream(seed) {
    absorb(id0);
    absorb(id1);
    absorb(id2);
  }

  // Fold one more label into the stream key.
  void absorb(std::uint64_t id) { state_ = detail::mix64(state_ ^ (id + detail::kGolden)); }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms.
  double next_normal() {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

// Exact Binomial(n, p) by inverse-CDF walk. Large n is split into blocks so
// (1-p)^block never underflows; the law is unchanged. Consumes one uniform
// per block.
inline long binomial_draw(RngStream& rng, long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  constexpr long kBlock = 1000;
  long total = 0;
  while (n > 0) {
    long m = (n > kBlock) ? kBlock : n;
    n -= m;
    double u = rng.next_double();
    double q = 1.0 - p;
    double pmf = std::pow(q, static_cast<double>(m));
    double cdf = pmf;
    long k = 0;
    while (u >= cdf && k < m) {
      ++k;
      pmf *= (static_cast<double>(m - k + 1) / static_cast<double>(k)) * (p / q);
      cdf += pmf;
    }
    total += k;
  }
  return total;
}

}  // namespace rodeo

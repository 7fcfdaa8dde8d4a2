#ifndef VRJP_RNG_HPP
#define VRJP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace vrjp {

/**
 * SplitMix64 stream.  Streams for independent trials are keyed by
 * (seed, index) through the same finalizer, so trial k draws the same
 * numbers regardless of which worker runs it or in what order.
 *
 * Unit draws take the top 53 bits: u = (x >> 11) * 2^-53, u in [0, 1).
 * Exponential draws use the inverse CDF E = -log1p(-u) / rate.
 */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace vrjp

#endif  // VRJP_RNG_HPP

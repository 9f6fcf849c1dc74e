#pragma once

#include <cstdint>
#include <vector>

namespace lindml {

// Small splittable PRNG (SplitMix64 core). Every consumer takes an Rng by
// reference; independent substreams are derived by index so that generation
// is reproducible regardless of evaluation order or thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kStreamSalt)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double u01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal draw via the inverse CDF (deterministic given the seed).
  double normal();

  // Independent stream addressed by (this stream's seed, index).
  Rng substream(std::uint64_t index) const {
    return Rng(mix(state_ ^ (0xd1342543de82ef95ULL * (index + 1))));
  }

 private:
  static constexpr std::uint64_t kStreamSalt = 0x8e2f0f0a4c1b3d57ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Inverse standard normal CDF, accurate to full double precision
// (Wichura's PPND16 rational approximations). Defined for u in (0, 1).
double norm_quantile(double u);

}  // namespace lindml

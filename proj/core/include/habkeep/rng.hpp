#pragma once

#include <cstdint>
#include <string_view>

namespace hab {

// SplitMix64. All randomness in the project flows through this generator so
// that results are reproducible bit-for-bit from a single 64-bit seed,
// independent of the standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

// FNV-1a, used to derive named sub-stream seeds and config fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Independent named sub-stream of a root seed. Streams with different names
// (or indices) are statistically independent; adding a consumer of one stream
// never perturbs another.
inline SplitMix64 substream(std::uint64_t root_seed, std::string_view name,
                            std::uint64_t index = 0) {
  std::uint64_t h = fnv1a64(name);
  h = fnv1a64_mix(h, root_seed);
  h = fnv1a64_mix(h, index);
  return SplitMix64(h);
}

}  // namespace hab

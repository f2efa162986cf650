#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace ordac {

// splitmix64 finalizer; used for seed derivation only, never as the stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent seed from (base, stream, index). Every random draw
// in the project traces back to a config seed through this function.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(base ^ 0x6a09e667f3bcc909ull * (stream + 1)) + index);
}

// Fixed stream tags so independent draws never share a sequence.
namespace seed_stream {
inline constexpr std::uint64_t kModelInit = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kRetrain = 3;
inline constexpr std::uint64_t kTestSplit = 4;
inline constexpr std::uint64_t kRepeat = 5;
inline constexpr std::uint64_t kFoldModel = 6;
}  // namespace seed_stream

// Deterministic generator. mt19937_64 single-value seeding and output are
// fully pinned by the standard; the helpers below avoid std::*_distribution,
// whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) without modulo bias.
  std::size_t next_index(std::size_t bound) {
    assert(bound > 0);
    const std::uint64_t n = bound;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  // Standard normal via Marsaglia polar; one spare value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ordac

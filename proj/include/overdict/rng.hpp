#pragma once

// Deterministic splittable RNG. All randomness in the library flows from one
// 64-bit seed through derive_seed(), so independent stages (support sampling,
// value sampling, edge shuffling, per-anchor pair splits) draw from
// non-overlapping streams and results do not depend on evaluation order.
//
// std::mt19937 + std::*_distribution are avoided on purpose: distribution
// output is implementation-defined, and the reproducibility contract here is
// bit-identical across runs and toolchains.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace overdict {

// Substream tags. Values are part of the determinism contract; do not reorder.
enum class Stream : std::uint64_t {
  dictionary = 1,
  coefficient_support = 2,
  coefficient_value = 3,
  edge_order = 4,
  anchor_test = 5,
  agreement = 6,
  perturbation = 7,
};

namespace detail {
// Finalizer from the splitmix64 generator (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
}  // namespace detail

// Hash (seed, stream, a, b) into a fresh seed for a substream. Used to give
// every (stream, index) pair its own generator, e.g. one per anchor edge, so
// verdicts do not depend on the order in which edges are visited.
inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = seed;
  h = detail::mix64(h + detail::golden * static_cast<std::uint64_t>(stream));
  h = detail::mix64(h + detail::golden * a + 0xD1B54A32D192ED03ULL);
  h = detail::mix64(h + detail::golden * b + 0x8CB92BA72F3D8DD7ULL);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += detail::golden;
    return detail::mix64(state_);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection on the biased region keeps the
  // distribution exactly uniform for every n.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  // +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Uniform k-subset of {0, ..., pool-1}, returned sorted. Partial
  // Fisher-Yates over a scratch pool; pool sizes here are small (the atom
  // count), so rebuilding the pool per call is cheap.
  std::vector<int> sample_subset(int pool, int k) {
    scratch_.resize(static_cast<std::size_t>(pool));
    for (int i = 0; i < pool; ++i) scratch_[static_cast<std::size_t>(i)] = i;
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(next_below(static_cast<std::uint64_t>(pool - i)));
      std::swap(scratch_[static_cast<std::size_t>(i)], scratch_[j]);
      out[static_cast<std::size_t>(i)] = scratch_[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
  std::vector<int> scratch_;
};

}  // namespace overdict

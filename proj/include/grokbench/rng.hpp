#pragma once

#include <cstdint>
#include <vector>

namespace grokbench {

// xoshiro256** 1.0 (Blackman & Vigna, public domain), state seeded with
// splitmix64 as the authors recommend. Chosen over std::mt19937 so that runs
// can be replayed bit-for-bit from the seed recorded in run metadata,
// independent of the standard library in use.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (no state caching; one value per call).
  double gaussian();

  /// Uniform integer in [0, n). Uses modulo reduction; the bias is
  /// negligible for the table sizes used here (n < 2^20) and keeps the
  /// sequence trivially reproducible in other languages.
  std::uint64_t below(std::uint64_t n);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace grokbench

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pading/matrix.hpp"

namespace pading {

// Seedable generator passed explicitly everywhere randomness is needed; the
// library never touches a global RNG. Draws avoid std distributions so a
// given seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed + 0x9E3779B97F4A7C15ull)) {}

  std::uint64_t next_u64() {
    // xorshift64* keeps the state one word; quality is plenty for sampling.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    // Modulo bias is < n / 2^64; irrelevant at our scales.
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = stddev * normal();
    return m;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    // Fisher-Yates
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // Independent child stream; children with distinct tags never collide
  // with each other or with the parent.
  Rng fork(std::uint64_t tag) const {
    return Rng(splitmix(state_ ^ splitmix(tag)));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  friend std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable sub-seed for a named stage of a seeded computation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return Rng::splitmix(Rng::splitmix(seed) ^ Rng::splitmix(tag));
}

}  // namespace pading

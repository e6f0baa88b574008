#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace interp {

// Named substream domains. Every piece of randomness in the toolkit draws
// from a Substream keyed (seed, domain, a, b), so results never depend on
// scheduling, worker count, or call order.
enum class RngDomain : std::uint64_t {
  split_shuffle = 1,
  forest_tree = 2,
  pfi_permutation = 3,
  shapley_permutation = 4,
  lime_mask = 5,
  interaction_subsample = 6,
  harness = 7,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based deterministic RNG. A fresh instance with the same key
/// always produces the same sequence, independent of any other stream.
class Substream {
 public:
  Substream(std::uint64_t seed, RngDomain domain, std::uint64_t a = 0,
            std::uint64_t b = 0) {
    state_ = seed;
    absorb(static_cast<std::uint64_t>(domain));
    absorb(a);
    absorb(b);
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), unbiased via rejection. n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  bool next_bool() { return (next_u64() & 1ull) != 0; }

  /// Standard normal via Box-Muller (second value cached).
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Deterministic Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Identity permutation of size n, shuffled.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    return idx;
  }

 private:
  void absorb(std::uint64_t key) {
    std::uint64_t k = key;
    state_ ^= detail::splitmix64(k);
    detail::splitmix64(state_);
  }

  std::uint64_t state_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace interp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "interp/rng.hpp"

using interp::RngDomain;
using interp::Substream;

TEST_CASE("identical keys replay the identical sequence") {
  Substream a(42, RngDomain::lime_mask, 3, 7);
  Substream b(42, RngDomain::lime_mask, 3, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("any key component change moves the stream") {
  auto first_words = [](Substream s) {
    std::vector<std::uint64_t> w(8);
    for (auto& x : w) x = s.next_u64();
    return w;
  };
  const auto base = first_words(Substream(42, RngDomain::forest_tree, 1, 2));
  CHECK(first_words(Substream(43, RngDomain::forest_tree, 1, 2)) != base);
  CHECK(first_words(Substream(42, RngDomain::pfi_permutation, 1, 2)) != base);
  CHECK(first_words(Substream(42, RngDomain::forest_tree, 2, 2)) != base);
  CHECK(first_words(Substream(42, RngDomain::forest_tree, 1, 3)) != base);
}

TEST_CASE("streams with different counters do not collide pairwise") {
  // 64 substreams, 64 words each: all 4096 words distinct.
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 64; ++t) {
    Substream s(7, RngDomain::forest_tree, t);
    for (int i = 0; i < 64; ++i) seen.insert(s.next_u64());
  }
  CHECK(seen.size() == 64u * 64u);
}

TEST_CASE("next_unit stays in the half-open unit interval") {
  Substream s(1, RngDomain::harness);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_below respects its bound and covers the range") {
  Substream s(9, RngDomain::split_shuffle);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = s.next_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  // Loose uniformity: each bucket within 10% of the expected 10000.
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("next_below handles n = 1 and large n") {
  Substream s(3, RngDomain::harness);
  for (int i = 0; i < 100; ++i) CHECK(s.next_below(1) == 0);
  for (int i = 0; i < 100; ++i) CHECK(s.next_below(1ull << 62) < (1ull << 62));
}

TEST_CASE("permutation returns a permutation") {
  Substream s(5, RngDomain::shapley_permutation, 11);
  const auto p = s.permutation(50);
  REQUIRE(p.size() == 50);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("shuffle visits all orderings of three items roughly evenly") {
  std::map<std::vector<int>, int> counts;
  const int trials = 6000;
  for (int t = 0; t < trials; ++t) {
    Substream s(100, RngDomain::split_shuffle, static_cast<std::uint64_t>(t));
    std::vector<int> v{0, 1, 2};
    s.shuffle(v);
    ++counts[v];
  }
  REQUIRE(counts.size() == 6);
  for (const auto& [order, c] : counts) {
    CHECK(c > 800);   // expected 1000 per ordering
    CHECK(c < 1200);
  }
}

TEST_CASE("next_normal has approximately standard moments") {
  Substream s(8, RngDomain::harness, 2);
  const int n = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next_normal();
    REQUIRE(std::isfinite(x));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("sequences are independent of interleaving") {
  // Drawing from one stream must not disturb another.
  Substream a(42, RngDomain::forest_tree, 0);
  Substream b(42, RngDomain::forest_tree, 1);
  std::vector<std::uint64_t> a_solo;
  {
    Substream a2(42, RngDomain::forest_tree, 0);
    for (int i = 0; i < 100; ++i) a_solo.push_back(a2.next_u64());
  }
  for (int i = 0; i < 100; ++i) {
    (void)b.next_u64();
    CHECK(a.next_u64() == a_solo[static_cast<std::size_t>(i)]);
  }
}

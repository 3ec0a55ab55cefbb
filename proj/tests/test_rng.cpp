#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "siltlab/rng.hpp"

using silt::Rng;
using silt::StreamSalt;
using silt::derive_seed;
using silt::splitmix64;

TEST_CASE("same (seed, salt, index) reproduces the exact stream") {
  Rng a(42, StreamSalt::walk, 7);
  Rng b(42, StreamSalt::walk, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  Rng c(42, StreamSalt::walk, 7);
  Rng d(42, StreamSalt::walk, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.u01() == d.u01());
    CHECK(c.normal() == d.normal());
    CHECK(c.exponential(2.5) == d.exponential(2.5));
  }
}

TEST_CASE("salts and indices open distinct substreams") {
  // a collision in the first word across salts/indices would mean the replica
  // streams are not actually separated
  std::set<std::uint64_t> first_words;
  for (auto salt : {StreamSalt::walk, StreamSalt::field, StreamSalt::lhs,
                    StreamSalt::rhs, StreamSalt::generic}) {
    for (std::uint64_t idx = 0; idx < 50; ++idx) {
      Rng r(123, salt, idx);
      first_words.insert(r.next_u64());
    }
  }
  CHECK(first_words.size() == 5 * 50);
}

TEST_CASE("derive_seed is stable across builds") {
  // regression pins: these values define the reproducibility contract, and a
  // silent change would invalidate every recorded seed in existing output
  CHECK(derive_seed(0, StreamSalt::generic, 0) == splitmix64(splitmix64(splitmix64(0) ^ 0x67656e65ULL) ^ 0));
  CHECK(derive_seed(1, StreamSalt::walk, 0) == derive_seed(1, StreamSalt::walk, 0));
  CHECK(derive_seed(1, StreamSalt::walk, 0) != derive_seed(1, StreamSalt::walk, 1));
  CHECK(derive_seed(1, StreamSalt::walk, 0) != derive_seed(1, StreamSalt::field, 0));
  CHECK(derive_seed(1, StreamSalt::walk, 0) != derive_seed(2, StreamSalt::walk, 0));
}

TEST_CASE("u01 stays inside (0, 1] so log never blows up") {
  Rng r(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = r.u01();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // the sample should actually fill the interval
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("exponential draws have the right mean") {
  Rng r(11);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.exponential(4.0);
    REQUIRE(x > 0.0);
    REQUIRE(std::isfinite(x));
    s += x;
  }
  const double mean = s / n;
  // Exp(4): mean 1/4, sd 1/4, se of the mean = 1/(4 sqrt(n))
  CHECK(std::fabs(mean - 0.25) < 4.0 * 0.25 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("normal draws have the right first two moments") {
  Rng r(13);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  // Var of the sample variance of a Gaussian is about 2/n
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("below(n) is within binomial noise of uniform") {
  Rng r(17);
  const std::uint64_t n = 6;
  const int draws = 600000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = r.below(n);
    REQUIRE(v < n);
    ++counts[static_cast<std::size_t>(v)];
  }
  const double expect = static_cast<double>(draws) / static_cast<double>(n);
  const double sd = std::sqrt(expect * (1.0 - 1.0 / static_cast<double>(n)));
  for (std::uint64_t k = 0; k < n; ++k)
    CHECK(std::fabs(counts[static_cast<std::size_t>(k)] - expect) < 5.0 * sd);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "prefrec/rng.hpp"

using prefrec::Rng;

TEST_CASE("splitmix64 matches the published reference sequence for seed 0") {
  std::uint64_t state = 0;
  CHECK(prefrec::splitmix64_next(state) == 0xe220a8397b1dcdafULL);
  CHECK(prefrec::splitmix64_next(state) == 0x6e789e6aa1b965f4ULL);
  CHECK(prefrec::splitmix64_next(state) == 0x06c45d188009454fULL);
}

TEST_CASE("identical seeds reproduce the identical sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.u64() == b.u64());
}

TEST_CASE("streams are keyed by seed, tag and index") {
  const std::uint64_t base = Rng::stream(7, "replay", 3).u64();
  CHECK(Rng::stream(7, "replay", 3).u64() == base);
  CHECK(Rng::stream(7, "replay", 4).u64() != base);
  CHECK(Rng::stream(7, "finetune", 3).u64() != base);
  CHECK(Rng::stream(8, "replay", 3).u64() != base);
}

TEST_CASE("stream derivation is stateless: order of derivation is irrelevant") {
  Rng first = Rng::stream(11, "init.policy");
  Rng scratch = Rng::stream(11, "replay", 999);
  for (int i = 0; i < 10; ++i) scratch.u64();
  Rng second = Rng::stream(11, "init.policy");
  for (int i = 0; i < 100; ++i) CHECK(first.u64() == second.u64());
}

TEST_CASE("uniform stays inside [0, 1) and fills the range") {
  Rng rng(5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform(lo, hi) respects its bounds") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.5, 3.5);
    CHECK(u >= -2.5);
    CHECK(u < 3.5);
  }
}

TEST_CASE("below(n) is always in range and unbiased within 5 sigma") {
  Rng rng(9);
  const std::uint64_t n = 7;
  const int draws = 70000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.below(n);
    REQUIRE(v < n);
    ++counts[v];
  }
  const double expected = static_cast<double>(draws) / static_cast<double>(n);
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / static_cast<double>(n)));
  for (std::uint64_t k = 0; k < n; ++k) {
    CHECK(std::fabs(counts[k] - expected) < 5.0 * sigma);
  }
}

TEST_CASE("normal() has mean 0 and variance 1 within 5 sigma") {
  Rng rng(13);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  // Var of the sample variance of a standard normal is ~2/n.
  CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("unit_vector returns unit norm in every dimension tried") {
  Rng rng(17);
  for (int d : {1, 2, 3, 8, 245}) {
    const std::vector<double> v = rng.unit_vector(d);
    REQUIRE(static_cast<int>(v.size()) == d);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    CHECK(std::fabs(std::sqrt(norm2) - 1.0) < 1e-12);
  }
}

TEST_CASE("distinct tags give decorrelated streams") {
  // Crude independence check: matching 64-bit outputs across streams would
  // indicate key collisions.
  std::set<std::uint64_t> seen;
  const char* tags[] = {"init.policy", "init.q1", "init.q2", "init.v",
                        "init.reward", "replay",  "pretrain"};
  for (const char* tag : tags) {
    for (std::uint64_t idx = 0; idx < 50; ++idx) {
      CHECK(seen.insert(Rng::stream(3, tag, idx).u64()).second);
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "toolwear/rng.hpp"

using namespace toolwear;

TEST_SUITE("rng") {
  TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64(nullptr, 0) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("hello", 5) == 0xa430d84680aabd0bull);
  }

  TEST_CASE("fnv1a64 chains across calls") {
    std::uint64_t h = fnv1a64("he", 2);
    CHECK(fnv1a64("llo", 3, h) == fnv1a64("hello", 5));
  }

  TEST_CASE("splitmix64 reference sequence from zero state") {
    Rng r(0);
    CHECK(r.next_u64() == 0xe220a8397b1dcdafull);
    CHECK(r.next_u64() == 0x6e789e6aa1b965f4ull);
    CHECK(r.next_u64() == 0x06c45d188009454full);
  }

  TEST_CASE("same key reproduces the sequence") {
    Rng a(987654321), b(987654321);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  }

  TEST_CASE("derive_key separates tags and indices") {
    std::uint64_t base = derive_key(42, "chain", 0, 0);
    CHECK(base == derive_key(42, "chain", 0, 0));
    CHECK(base != derive_key(42, "chain", 1, 0));
    CHECK(base != derive_key(42, "chain", 0, 1));
    CHECK(base != derive_key(42, "noise", 0, 0));
    CHECK(base != derive_key(43, "chain", 0, 0));
  }

  TEST_CASE("uniform01 stays in the half-open unit interval") {
    Rng r = Rng::stream(7, "test");
    for (int i = 0; i < 20000; ++i) {
      double u = r.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("normal moments") {
    Rng r = Rng::stream(11, "test");
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = r.normal();
      sum += z;
      sq += z * z;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);      // 3 sigma ~ 0.0067
    CHECK(std::fabs(var - 1.0) < 0.02);
  }

  TEST_CASE("cauchy quartiles bracket location +- scale") {
    Rng r = Rng::stream(13, "test");
    const int n = 100000;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = r.cauchy(2.0, 1.5);
    std::sort(v.begin(), v.end());
    // quartiles of Cauchy(loc, s) are loc -+ s, median loc
    CHECK(std::fabs(v[n / 2] - 2.0) < 0.05);
    CHECK(std::fabs(v[n / 4] - 0.5) < 0.1);
    CHECK(std::fabs(v[3 * n / 4] - 3.5) < 0.1);
  }

  TEST_CASE("uniform_int bounds and coverage") {
    Rng r = Rng::stream(17, "test");
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) {
      int k = r.uniform_int(5);
      REQUIRE(k >= 0);
      REQUIRE(k < 5);
      ++counts[static_cast<std::size_t>(k)];
    }
    for (int c : counts) CHECK(c > 9000);  // each ~10000
  }

  TEST_CASE("distinct streams differ immediately") {
    Rng a = Rng::stream(5, "truth", 1);
    Rng b = Rng::stream(5, "truth", 2);
    Rng c = Rng::stream(5, "noise", 1);
    std::uint64_t va = a.next_u64(), vb = b.next_u64(), vc = c.next_u64();
    CHECK(va != vb);
    CHECK(va != vc);
    CHECK(vb != vc);
  }
}

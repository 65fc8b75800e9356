#include "doctest.h"

#include <cmath>

#include "forgetlab/rng.hpp"

using namespace forgetlab;

TEST_CASE("same seed gives identical stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 10000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("scoped streams are deterministic and distinct") {
  Rng root(123);
  Rng init1 = root.scope("init");
  Rng init2 = Rng(123).scope("init");
  Rng shuffle = root.scope("shuffle");
  bool identical = true, distinct = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t x = init1.next_u64();
    if (x != init2.next_u64()) identical = false;
    if (x != shuffle.next_u64()) distinct = true;
  }
  CHECK(identical);
  CHECK(distinct);
}

TEST_CASE("scope derivation ignores parent draw position") {
  Rng a(9), b(9);
  a.next_u64();
  a.next_u64();
  CHECK(a.scope("x").next_u64() == b.scope("x").next_u64());
}

TEST_CASE("uniform stays in range, normal has sane moments") {
  Rng rng(5);
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sumsq / n - 1.0) < 0.05);
}

TEST_CASE("permutation and sampling are valid") {
  Rng rng(77);
  auto p = rng.permutation(50);
  std::vector<bool> seen(50, false);
  for (auto i : p) seen[i] = true;
  for (bool s : seen) CHECK(s);

  auto sub = rng.sample_without_replacement(100, 10);
  CHECK(sub.size() == 10);
  std::vector<bool> seen2(100, false);
  for (auto i : sub) {
    CHECK(!seen2[i]);
    seen2[i] = true;
  }
}

#include <cmath>
#include <set>

#include "bvis/walk.hpp"
#include "doctest.h"

using namespace bvis;

namespace {

// Reference SplitMix64 written out from the published constants.
std::uint64_t reference_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TEST_CASE("SplitMix64 first output from seed 0") {
  std::uint64_t s = 0;
  CHECK(reference_next(s) == 0xE220A8397B1DCDAFULL);
  const auto [u, next] = next_uniform(RngState{0});
  CHECK(u == static_cast<double>(0xE220A8397B1DCDAFULL >> 11) / 9007199254740992.0);
  CHECK(u == doctest::Approx(0.8833108082136426).epsilon(1e-15));
  CHECK(next.state == 0x9E3779B97F4A7C15ULL);
}

TEST_CASE("uniform stream matches the reference and stays in [0,1)") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL, ~0ULL}) {
    std::uint64_t ref = seed;
    RngState s{seed};
    for (int i = 0; i < 10000; ++i) {
      const auto [u, next] = next_uniform(s);
      s = next;
      const std::uint64_t z = reference_next(ref);
      REQUIRE(u == static_cast<double>(z >> 11) * 0x1.0p-53);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
  }
}

TEST_CASE("identical seeds give identical streams") {
  RngState a{77}, b{77};
  for (int i = 0; i < 1000000; ++i) REQUIRE(next_u64(a) == next_u64(b));
}

TEST_CASE("derive_trial_seed") {
  for (std::uint64_t m : {0ULL, 5ULL, 0x123456789ULL}) {
    std::uint64_t s = m;
    const std::uint64_t first = reference_next(s);
    CHECK(derive_trial_seed(m, 0, 0, 1) == first);
    CHECK(derive_trial_seed(m, 0, 0, 7) == first);
    // (trial, walker) = (2, 3) with W = 5 is the 14th output.
    std::uint64_t t = m;
    std::uint64_t z = 0;
    for (int i = 0; i < 14; ++i) z = reference_next(t);
    CHECK(derive_trial_seed(m, 2, 3, 5) == z);
  }
  RngState rng{99};
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t m = next_u64(rng);
    REQUIRE(derive_trial_seed(m, 0, 0, 2) != derive_trial_seed(m, 0, 1, 2));
  }
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 100; ++t) {
    for (std::uint64_t w = 0; w < 10; ++w) seen.insert(derive_trial_seed(3, t, w, 10));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("WalkerConfig") {
  CHECK_THROWS_AS(WalkerConfig(0.0), DomainError);
  CHECK_THROWS_AS(WalkerConfig(1.0), DomainError);
  CHECK_THROWS_AS(WalkerConfig(-0.5), DomainError);
  CHECK_THROWS_AS(WalkerConfig(std::nan("")), DomainError);
  // The integer threshold reproduces the floating comparison.
  for (double alpha : {0.5, 0.3, 1e-9, 1.0 - 1e-15, 0.1234567}) {
    const WalkerConfig cfg(alpha);
    RngState s{11};
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t z = next_u64(s);
      REQUIRE((to_unit(z) < alpha) == ((z >> 11) < cfg.threshold()));
    }
  }
}

TEST_CASE("walk structure") {
  for (double alpha : {0.5, 0.3, 0.9}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      std::uint64_t i = 0;
      LatticePoint prev{0, 0};
      for (const LatticePoint& p : walk_positions(WalkerConfig(alpha), seed, 5000)) {
        ++i;
        REQUIRE(p.x + p.y == static_cast<std::int64_t>(i));
        REQUIRE(p.x - prev.x + p.y - prev.y == 1);
        REQUIRE(p.x >= prev.x);
        REQUIRE(p.y >= prev.y);
        prev = p;
      }
      CHECK(i == 5000);
    }
  }
  CHECK_THROWS_AS(walk_positions(WalkerConfig(0.5), 1, 0), DomainError);
}

TEST_CASE("walk follows the uniforms") {
  const WalkerConfig cfg(0.4);
  WalkStream w(cfg, 123);
  RngState s{123};
  for (int i = 0; i < 1000; ++i) {
    const LatticePoint before = w.position();
    const auto [u, next] = next_uniform(s);
    s = next;
    const LatticePoint after = w.next();
    REQUIRE(after.x - before.x == (u < 0.4 ? 1 : 0));
  }
  CHECK(w.steps() == 1000);
  CHECK(w.rng().state == s.state);
}

TEST_CASE("alpha close to one drifts along the x-axis") {
  // Seed 0's first 100 uniforms are all below 1 - 1e-15.
  RngState s{0};
  for (int i = 0; i < 100; ++i) REQUIRE(to_unit(next_u64(s)) < 1.0 - 1e-15);
  std::int64_t i = 0;
  for (const LatticePoint& p : walk_positions(WalkerConfig(1.0 - 1e-15), 0, 100)) {
    ++i;
    REQUIRE(p == LatticePoint{i, 0});
  }
}

TEST_CASE("step frequencies concentrate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LatticePoint last{};
    for (const LatticePoint& p : walk_positions(WalkerConfig(0.5), seed, 100000)) last = p;
    CHECK(std::abs(static_cast<double>(last.x) / 1e5 - 0.5) <= 0.01);
  }
  for (double alpha : {0.5, 0.3, 0.05}) {
    const std::uint64_t n = 1000000;
    WalkStream w(WalkerConfig(alpha), 2024);
    for (std::uint64_t i = 0; i < n; ++i) w.next();
    const double freq = static_cast<double>(w.position().x) / static_cast<double>(n);
    CHECK(std::abs(freq - alpha) <= 4.0 * std::sqrt(alpha * (1 - alpha) / static_cast<double>(n)));
  }
}

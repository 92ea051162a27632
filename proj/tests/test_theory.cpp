#include <cmath>
#include <numeric>

#include "bvis/binomial.hpp"
#include "bvis/theory.hpp"
#include "bvis/walk.hpp"
#include "doctest.h"

using namespace bvis;

namespace {

// Reference values computed offline to 30 digits (mpmath, all primes below
// 10^7 plus analytic tails).
struct Reference {
  int b1, b2;
  std::uint64_t count;
  double value;
};

const Reference kWatchpointRefs[] = {
    {1, 2, 3, 0.5345668721}, {1, 3, 3, 0.7773734288}, {1, 5, 3, 0.9489938230},
    {2, 5, 3, 0.9751816988}, {3, 5, 3, 0.9878212423},
};
const Reference kWalkerRefs[] = {
    {2, 3, 4, 0.8812259445}, {2, 3, 20, 0.7168608957}, {2, 3, 100000, 0.6102606266},
};

// Brute-force mu for small n.
int mobius_naive(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

// f_b(n) straight from the divisor-sum definition.
double f_b_divisor_sum(const BExponent& b, std::uint64_t n) {
  double s = 0.0;
  for (std::uint64_t d = 1;; ++d) {
    const double p1 = std::pow(static_cast<double>(d), b.b1());
    if (p1 > static_cast<double>(n)) break;
    if (n % static_cast<std::uint64_t>(p1) == 0) s += mobius_naive(d) / std::pow(d, b.b2());
  }
  return s;
}

double binom_pmf(int n, int k, double a) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                  k * std::log(a) + (n - k) * std::log1p(-a));
}

}  // namespace

TEST_CASE("watchpoint densities") {
  for (const auto& r : kWatchpointRefs) {
    const DensityResult d = density_watchpoints(BExponent(r.b1, r.b2), r.count);
    CHECK(d.value == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(d.tail_bound <= kDefaultDensityTol);
  }
  CHECK(std::abs(density_watchpoints(BExponent(1, 2), 3).value - 0.534567) <= 5e-7);
  CHECK(std::abs(density_watchpoints(BExponent(3, 5), 3).value - 0.987821) <= 5e-7);
  const DensityResult zero = density_watchpoints(BExponent(1, 1), 4);
  CHECK(zero.value == 0.0);
  CHECK(zero.tail_bound == 0.0);
  CHECK_THROWS_AS(density_watchpoints(BExponent(1, 1), 5), DomainError);
  CHECK_THROWS_AS(density_watchpoints(BExponent(1, 1), 0), DomainError);
  // J = 1 at b = (1,1) is 1/zeta(2).
  CHECK(density_watchpoints(BExponent(1, 1), 1).value == doctest::Approx(1.0 / zeta_int(2)).epsilon(1e-9));
  // Coarser tolerance still brackets the fine value.
  const DensityResult coarse = density_watchpoints(BExponent(1, 2), 3, 1e-4);
  CHECK(std::abs(coarse.value - 0.5345668721) <= coarse.tail_bound + 1e-10);
}

TEST_CASE("walker densities") {
  for (const auto& r : kWalkerRefs) {
    const DensityResult d = density_walkers(BExponent(r.b1, r.b2), r.count);
    CHECK(d.value == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(d.tail_bound <= kDefaultDensityTol);
  }
  CHECK(std::abs(density_walkers(BExponent(2, 3), 2).value - 0.933076) <= 5e-7);
  // Printed table digits are truncated, so compare the truncation.
  CHECK(std::floor(density_walkers(BExponent(3, 5), 1000).value * 1e6) / 1e6 ==
        doctest::Approx(0.841122).epsilon(1e-12));
  CHECK_THROWS_AS(density_walkers(BExponent(2, 3), 0), DomainError);
  for (const BExponent b : {BExponent(1, 1), BExponent(2, 3), BExponent(1, 4), BExponent(5, 3)}) {
    CHECK(density_walkers(b, 1).value ==
          doctest::Approx(density_watchpoints(b, 1).value).epsilon(1e-10));
  }
}

TEST_CASE("walker densities decrease towards 1/zeta(b_lower)") {
  const double floor2 = 1.0 / zeta_int(2);
  double previous = 1.0;
  for (std::uint64_t r = 1; r <= 1000; ++r) {
    const double v = density_walkers(BExponent(2, 3), r).value;
    REQUIRE(v < previous);
    REQUIRE(v >= 0.607927 - 1e-6);
    REQUIRE(v >= floor2);
    previous = v;
  }
  const double floor3 = 1.0 / zeta_int(3);
  for (std::uint64_t r : {1, 10, 1000, 100000}) {
    CHECK(density_walkers(BExponent(3, 5), r).value >= floor3);
  }
}

TEST_CASE("axis symmetry of the walker density") {
  for (std::uint64_t r : {1, 2, 7, 50, 1000}) {
    CHECK(density_walkers(BExponent(2, 3), r).value == density_walkers(BExponent(3, 2), r).value);
    CHECK(density_walkers(BExponent(1, 4), r).value == density_walkers(BExponent(4, 1), r).value);
  }
}

TEST_CASE("f_b values") {
  CHECK(f_b_value(BExponent(2, 3), 12) == doctest::Approx(0.875));
  CHECK(f_b_value(BExponent(3, 7), 1) == 1.0);
  for (std::uint64_t p : {2ULL, 3ULL, 101ULL, 7919ULL, 1000003ULL}) {
    CHECK(f_b_value(BExponent(1, 2), p) == doctest::Approx(1.0 - 1.0 / static_cast<double>(p * p)));
  }
  CHECK_THROWS_AS(f_b_value(BExponent(1, 2), 0), DomainError);
  for (const BExponent b : {BExponent(1, 1), BExponent(2, 3), BExponent(3, 2)}) {
    for (std::uint64_t n = 1; n <= 3000; ++n) {
      REQUIRE(f_b_value(b, n) == doctest::Approx(f_b_divisor_sum(b, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("f_b is multiplicative and lies in (0,1]") {
  const BExponent b(2, 3);
  for (std::uint64_t n = 1; n <= 1000000; n += 7) {
    const double v = f_b_value(b, n);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
  RngState s{5};
  int tested = 0;
  while (tested < 2000) {
    const std::uint64_t m = next_u64(s) % 5000 + 1;
    const std::uint64_t n = next_u64(s) % 5000 + 1;
    if (std::gcd(m, n) != 1) continue;
    ++tested;
    REQUIRE(f_b_value(b, m * n) == doctest::Approx(f_b_value(b, m) * f_b_value(b, n)).epsilon(1e-14));
  }
}

TEST_CASE("f_{b,s} values") {
  const BExponent b12(1, 2);
  CHECK(f_bs_value(b12, ShiftVector{{0}}, 4) == doctest::Approx(0.75));
  for (const BExponent b : {BExponent(1, 2), BExponent(2, 3), BExponent(1, 1)}) {
    for (std::int64_t n = 1; n <= 10000; ++n) {
      REQUIRE(f_bs_value(b, ShiftVector{{0}}, n) ==
              doctest::Approx(f_b_value(b, static_cast<std::uint64_t>(n))).epsilon(1e-12));
    }
  }
  for (std::int64_t q : {5, 13, 101}) {
    CHECK(f_bs_value(BExponent(1, 3), ShiftVector{{0}}, q) ==
          doctest::Approx(1.0 - std::pow(static_cast<double>(q), -3)));
  }
  // Enumeration and product forms agree for several shifts.
  const PrimeTables tables = build_tables(20000);
  const ShiftVector s{{0, 3, -2}};
  for (const BExponent b : {BExponent(1, 2), BExponent(2, 3), BExponent(1, 1)}) {
    for (std::int64_t n = 4; n <= 5000; ++n) {
      REQUIRE(f_bs_value(b, s, n) ==
              doctest::Approx(detail::f_bs_product_form(b, s, n, tables)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(f_bs_value(b12, s, 3), DomainError);
  CHECK_THROWS_AS(f_bs_value(b12, ShiftVector{{}}, 3), DomainError);
}

TEST_CASE("mean value checks") {
  MeanValueParams moment;
  moment.kind = MeanValueKind::WalkerMoment;
  moment.b = BExponent(2, 3);
  moment.r = 2;
  const auto lo = mean_value_check(moment, 10000);
  const auto hi = mean_value_check(moment, 1000000);
  CHECK(std::abs(hi.partial_sum / 1e6 - 0.933076) <= 1e-2);
  CHECK(std::abs(hi.partial_sum / 1e6 - hi.density) <= std::abs(lo.partial_sum / 1e4 - lo.density));
  CHECK(hi.error_ratio <= 10.0);
  CHECK(hi.predicted_main == doctest::Approx(hi.density * 1e6));
  CHECK(hi.abs_error == doctest::Approx(std::abs(hi.partial_sum - hi.predicted_main)));
  CHECK(hi.error_ratio == doctest::Approx(hi.abs_error / std::sqrt(1e6)));

  MeanValueParams shifted;
  shifted.kind = MeanValueKind::WatchpointsShifted;
  shifted.b = BExponent(1, 1);
  shifted.shifts = ShiftVector{{0}};
  const auto sylvester = mean_value_check(shifted, 1000000);
  CHECK(std::abs(sylvester.partial_sum / 1e6 - 0.607927) <= 1e-3);
  CHECK(sylvester.error_scale == doctest::Approx(std::log(1e6)));
  CHECK(sylvester.error_ratio <= 10.0);

  shifted.b = BExponent(1, 2);
  shifted.shifts = ShiftVector{{0, 3, 3}};
  const auto three = mean_value_check(shifted, 100000);
  CHECK(std::abs(three.partial_sum / 1e5 - density_watchpoints(BExponent(1, 2), 3).value) <= 1e-2);
  CHECK(three.error_ratio <= 10.0);

  // The watchpoints sum equals the enumeration-based f_{b,s} over the same range.
  shifted.shifts = ShiftVector{{0, 1}};
  const auto small = mean_value_check(shifted, 300);
  KahanSum direct;
  for (std::int64_t n = 2; n <= 300; ++n) direct.add(f_bs_value(BExponent(1, 2), shifted.shifts, n));
  CHECK(small.partial_sum == doctest::Approx(direct.value()).epsilon(1e-13));

  CHECK_THROWS_AS(mean_value_check(moment, 99), DomainError);
  moment.b = BExponent(3, 2);
  CHECK_THROWS_AS(mean_value_check(moment, 1000), DomainError);
}

TEST_CASE("binomial rows") {
  for (double a : {0.5, 0.3, 0.01, 0.99}) {
    for (int n : {1, 2, 10, 57, 400}) {
      const auto row = binomial_pmf_row(n, a);
      REQUIRE(row.size() == static_cast<std::size_t>(n + 1));
      KahanSum total;
      for (int k = 0; k <= n; ++k) {
        total.add(row[k]);
        REQUIRE(row[k] == doctest::Approx(binom_pmf(n, k, a)).epsilon(1e-11));
      }
      CHECK(std::abs(total.value() - 1.0) <= 1e-14);
    }
  }
  const auto big = binomial_pmf_row(100000, 0.3);
  CHECK(big[30000] == doctest::Approx(binom_pmf(100000, 30000, 0.3)).epsilon(1e-9));
  CHECK_THROWS_AS(binomial_pmf_row(10, 0.0), DomainError);
  CHECK_THROWS_AS(binomial_pmf_row(10, 1.0), DomainError);
}

TEST_CASE("binomial congruence sums") {
  CHECK(binomial_congruence_sum(0.3, 50, 1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  const auto sums = binomial_congruence_sums(0.5, 10000, 7);
  KahanSum total;
  for (double s : sums) {
    CHECK(std::abs(s - 1.0 / 7) <= 0.01);
    total.add(s);
  }
  CHECK(std::abs(total.value() - 1.0) <= 1e-12);
  // Direct sum over k for a small case.
  double direct = 0.0;
  for (int k = 2; k <= 20; k += 3) direct += binom_pmf(20, k, 0.4);
  CHECK(binomial_congruence_sum(0.4, 20, 3, 2) == doctest::Approx(direct).epsilon(1e-12));
  // Deviation from 1/d shrinks with n.
  auto dev = [](std::uint64_t n) {
    double worst = 0.0;
    for (double s : binomial_congruence_sums(0.3, n, 5)) worst = std::max(worst, std::abs(s - 0.2));
    return worst;
  };
  CHECK(dev(10000) * 3 <= dev(100));
  CHECK_THROWS_AS(binomial_congruence_sum(0.5, 10, 11, 0), DomainError);
  CHECK_THROWS_AS(binomial_congruence_sum(0.5, 10, 0, 0), DomainError);
  CHECK_THROWS_AS(binomial_congruence_sum(0.5, 10, 3, 3), DomainError);
  CHECK_THROWS_AS(binomial_congruence_sum(1.5, 10, 3, 1), DomainError);
}

TEST_CASE("gcd_b-conditioned binomial sums") {
  const BExponent b(1, 2);
  // n = 3, m = 3, s = t = 0: gcd_b(3, k) = 1 fails only when 9 | k, i.e. k = 0.
  const double tiny = gcdb_conditioned_binomial_sum(b, 0.5, 3, 3, ShiftVector{{0}}, ShiftVector{{0}});
  CHECK(tiny == doctest::Approx(1.0 - 0.125));

  CHECK(gcdb_conditioned_binomial_sum(b, 0.5, 0, 5, ShiftVector{{0}}, ShiftVector{{1}}) == 1.0);
  CHECK(gcdb_conditioned_binomial_sum(b, 0.5, 0, 5, ShiftVector{{0}}, ShiftVector{{0}}) == 0.0);
  CHECK(gcdb_conditioned_binomial_sum(BExponent(1, 1), 0.5, 0, 4, ShiftVector{{0}}, ShiftVector{{0}}) == 0.0);

  // J = 1, s = t = 0, n = m: close to f_b(n) with error shrinking like m^(-1/2).
  for (std::int64_t n : {100, 1000, 10000}) {
    const double lhs = gcdb_conditioned_binomial_sum(BExponent(1, 1), 0.5, n, n, ShiftVector{{0}},
                                                     ShiftVector{{0}});
    const double rhs = f_b_value(BExponent(1, 1), static_cast<std::uint64_t>(n));
    CHECK(std::abs(lhs - rhs) <= 3.0 * 36.0 / std::sqrt(static_cast<double>(n)));
  }

  CHECK_THROWS_AS(gcdb_conditioned_binomial_sum(b, 0.5, 10, 5, ShiftVector{{0, 0}}, ShiftVector{{1, 1}}),
                  DomainError);
  CHECK_THROWS_AS(gcdb_conditioned_binomial_sum(b, 0.5, 10, 5, ShiftVector{{0, 4}}, ShiftVector{{0, 8}}),
                  DomainError);
  CHECK_THROWS_AS(gcdb_conditioned_binomial_sum(b, 0.5, 10, 2, ShiftVector{{0, 3}}, ShiftVector{{0, 1}}),
                  DomainError);
  CHECK_THROWS_AS(gcdb_conditioned_binomial_sum(b, 0.5, 10, 9, ShiftVector{{0, 3}}, ShiftVector{{0}}),
                  DomainError);
  CHECK_NOTHROW(gcdb_conditioned_binomial_sum(b, 0.5, 10, 9, ShiftVector{{0, 3}}, ShiftVector{{0, 1}}));
}

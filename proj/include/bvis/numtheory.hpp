#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bvis/error.hpp"

namespace bvis {

/// The exponent pair b = (b1, b2) of the visibility curves
/// a1 (y - q2)^b1 = a2 (x - q1)^b2. Both entries are positive and coprime.
class BExponent {
 public:
  BExponent(int b1, int b2);

  int b1() const noexcept { return b1_; }
  int b2() const noexcept { return b2_; }
  int lower() const noexcept { return b1_ < b2_ ? b1_ : b2_; }
  int upper() const noexcept { return b1_ < b2_ ? b2_ : b1_; }
  int sum() const noexcept { return b1_ + b2_; }
  BExponent swapped() const { return {b2_, b1_}; }

  friend bool operator==(const BExponent&, const BExponent&) = default;

 private:
  int b1_;
  int b2_;
};

struct PrimePower {
  std::uint64_t prime;
  int exponent;
};

inline constexpr std::uint64_t kDefaultTableCap = 200'000'000;

/// Sieved primes, Moebius values and smallest prime factors for 0..limit.
/// Immutable after construction.
class PrimeTables {
 public:
  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }
  std::span<const std::int8_t> mobius() const noexcept { return mobius_; }
  std::span<const std::uint32_t> spf() const noexcept { return spf_; }

  int mobius(std::uint64_t n) const { return mobius_.at(n); }
  std::uint32_t spf(std::uint64_t n) const { return spf_.at(n); }

  /// Prime factorization of n >= 1 in ascending prime order. Uses the spf
  /// table when n <= limit and trial division by sieved primes otherwise.
  std::vector<PrimePower> factorize(std::uint64_t n) const;

 private:
  friend PrimeTables build_tables(std::uint64_t, std::uint64_t);
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::int8_t> mobius_;
  std::vector<std::uint32_t> spf_;
};

/// Linear sieve up to `limit`. Throws CapacityError when limit < 2 or
/// limit + 1 exceeds `cap` entries.
PrimeTables build_tables(std::uint64_t limit, std::uint64_t cap = kDefaultTableCap);

/// Trial-division factorization, independent of any table.
std::vector<PrimePower> factorize_trial(std::uint64_t n);

/// max{d >= 1 : d^b1 | m, d^b2 | n}, divisibility on absolute values.
/// Throws UndefinedInputError for m = n = 0.
std::uint64_t gcd_b(const BExponent& b, std::int64_t m, std::int64_t n);
std::uint64_t gcd_b(const BExponent& b, std::int64_t m, std::int64_t n, const PrimeTables& tables);

/// Riemann zeta at an integer k >= 2, absolute error below 1e-15.
double zeta_int(int k);

/// A truncated Euler product together with a rigorous bound on the distance
/// to the infinite product.
struct DensityResult {
  double value = 1.0;
  std::uint64_t prime_cutoff = 0;
  double tail_bound = 0.0;
};

/// Per-prime factor G(p) = base * exp(log_correction). `base` is the
/// mathematical factor F(p) and must lie in (0, 1]; an exact zero makes the
/// whole product vanish. `log_correction` carries a zeta-extraction term.
struct PrimeFactor {
  double base = 1.0;
  double log_correction = 0.0;
};

/// Description of prod_p G(p) * zeta(zeta_exponent)^(-zeta_power).
///
/// The caller promises |ln G(p)| <= bound_coefficient * p^(-decay) for every
/// prime p > bound_valid_above, with decay > 1.
struct EulerProduct {
  std::function<PrimeFactor(std::uint64_t)> factor;
  double bound_coefficient = 0.0;
  double decay = 2.0;
  std::uint64_t bound_valid_above = 1;
  int zeta_exponent = 0;
  double zeta_power = 0.0;
};

/// Smallest cutoff P whose analytic tail bound meets `tol`. Throws
/// DomainError when tol cannot be met in double precision.
std::uint64_t euler_cutoff(const EulerProduct& product, double tol);

/// Evaluates the product over all sieved primes p <= euler_cutoff(product,
/// tol). Throws CapacityError when the tables are too small and DomainError
/// when some base factor is negative.
DensityResult euler_product_truncated(const EulerProduct& product, double tol,
                                      const PrimeTables& tables);

/// Compensated (Kahan-Babuska) accumulator.
class KahanSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace bvis

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bvis/numtheory.hpp"

namespace bvis {

inline constexpr double kDefaultDensityTol = 1e-9;

/// prod_p (1 - J / p^(b1+b2)): the almost-sure visible proportion for one
/// walker and J pairwise visible watchpoints. Exactly 0 when J = 2^(b1+b2).
DensityResult density_watchpoints(const BExponent& b, std::uint64_t J,
                                  double tol = kDefaultDensityTol);

/// prod_p (1 - p^-lo + p^-lo (1 - p^-hi)^r) with lo = min(b1, b2),
/// hi = max(b1, b2): the proportion of steps at which r walkers are all
/// visible from the origin.
DensityResult density_walkers(const BExponent& b, std::uint64_t r,
                              double tol = kDefaultDensityTol);

/// Shifts s_1..s_J (and, where needed, t_1..t_J).
struct ShiftVector {
  std::vector<std::int64_t> values;

  std::size_t size() const noexcept { return values.size(); }
  std::int64_t operator[](std::size_t i) const { return values[i]; }
  std::int64_t max_abs() const noexcept;
};

/// f_{b,s}(n): sum over pairwise coprime d_1..d_J with d_j^b1 | n - s_j of
/// mu(d_1)...mu(d_J) / (d_1...d_J)^b2, by direct enumeration.
/// Requires n > max |s_j|.
double f_bs_value(const BExponent& b, const ShiftVector& s, std::int64_t n);

/// f_b(n) = sum_{d^b1 | n} mu(d) / d^b2, evaluated multiplicatively.
double f_b_value(const BExponent& b, std::uint64_t n);

namespace detail {
/// f_{b,s}(n) as prod_p (1 - c_p / p^b2), c_p = #{j : p^b1 | n - s_j}.
double f_bs_product_form(const BExponent& b, const ShiftVector& s, std::int64_t n,
                         const PrimeTables& tables);
}  // namespace detail

enum class MeanValueKind { WatchpointsShifted, WalkerMoment };

struct MeanValueParams {
  MeanValueKind kind = MeanValueKind::WalkerMoment;
  BExponent b{1, 1};
  ShiftVector shifts{{0}};  // WatchpointsShifted
  std::uint64_t r = 1;      // WalkerMoment
};

struct MeanValueReport {
  std::uint64_t x = 0;
  double partial_sum = 0.0;
  double density = 0.0;
  double predicted_main = 0.0;
  double abs_error = 0.0;
  double error_scale = 1.0;  // log^J x or x^(1/2)
  double error_ratio = 0.0;  // abs_error / error_scale
};

/// Compares sum_{n <= x} f_{b,s}(n) with x prod_p (1 - J/p^(b1+b2)), or
/// sum_{n <= x} f_b(n)^r with C_{b,r} x. Requires x >= 100 and b1 <= b2
/// (swap the axes first otherwise).
MeanValueReport mean_value_check(const MeanValueParams& params, std::uint64_t x);

/// sum over k = a (mod d), 0 <= k <= n, of C(n,k) alpha^k (1-alpha)^(n-k).
double binomial_congruence_sum(double alpha, std::uint64_t n, std::uint64_t d, std::uint64_t a);

/// The same mass for every residue a = 0..d-1 from one pmf row.
std::vector<double> binomial_congruence_sums(double alpha, std::uint64_t n, std::uint64_t d);

/// sum over 0 <= k <= m with gcd_b(n - s_j, k - t_j) = 1 for all j of the
/// Binomial(m, alpha) pmf. Requires n > max |s_j| and
/// gcd_b(s_i - s_j, t_i - t_j) = 1 for i != j.
double gcdb_conditioned_binomial_sum(const BExponent& b, double alpha, std::uint64_t m,
                                     std::int64_t n, const ShiftVector& s, const ShiftVector& t);

/// Shared, growing cache of prime tables for the evaluators.
std::shared_ptr<const PrimeTables> shared_prime_tables(std::uint64_t min_limit);

}  // namespace bvis

#include "bvis/numtheory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>

namespace bvis {

BExponent::BExponent(int b1, int b2) : b1_(b1), b2_(b2) {
  if (b1 < 1 || b2 < 1) {
    throw DomainError("b exponents must be positive, got (" + std::to_string(b1) + "," +
                      std::to_string(b2) + ")");
  }
  if (std::gcd(b1, b2) != 1) {
    throw DomainError("b exponents must be coprime, got (" + std::to_string(b1) + "," +
                      std::to_string(b2) + ")");
  }
}

PrimeTables build_tables(std::uint64_t limit, std::uint64_t cap) {
  if (limit < 2) throw CapacityError("prime table limit must be at least 2");
  if (limit >= cap || limit > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw CapacityError("prime table limit " + std::to_string(limit) + " exceeds the cap of " +
                        std::to_string(cap) + " entries");
  }
  PrimeTables t;
  t.limit_ = limit;
  t.spf_.assign(limit + 1, 0);
  t.mobius_.assign(limit + 1, 0);
  t.spf_[1] = 1;
  t.mobius_[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (t.spf_[i] == 0) {
      t.spf_[i] = static_cast<std::uint32_t>(i);
      t.mobius_[i] = -1;
      t.primes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t si = t.spf_[i];
    for (std::uint32_t p : t.primes_) {
      if (p > si || i * p > limit) break;
      t.spf_[i * p] = p;
      t.mobius_[i * p] = (p == si) ? 0 : static_cast<std::int8_t>(-t.mobius_[i]);
    }
  }
  return t;
}

namespace {

void trial_divide_from(std::uint64_t& n, std::uint64_t start, std::vector<PrimePower>& out) {
  for (std::uint64_t p = start; p <= n / p; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
  }
  if (n > 1) {
    out.push_back({n, 1});
    n = 1;
  }
}

}  // namespace

std::vector<PrimePower> factorize_trial(std::uint64_t n) {
  std::vector<PrimePower> out;
  if (n <= 1) return out;
  trial_divide_from(n, 2, out);
  return out;
}

std::vector<PrimePower> PrimeTables::factorize(std::uint64_t n) const {
  std::vector<PrimePower> out;
  if (n <= 1) return out;
  if (n <= limit_) {
    while (n > 1) {
      const std::uint32_t p = spf_[n];
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return out;
  }
  for (std::uint32_t p : primes_) {
    if (static_cast<std::uint64_t>(p) > n / p) break;
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
  }
  if (n > 1) {
    const std::uint64_t last = primes_.empty() ? 1 : primes_.back();
    if (last * last >= n) {
      out.push_back({n, 1});
    } else {
      trial_divide_from(n, last + 2 - (last % 2 == 0 ? 1 : 0), out);
    }
  }
  return out;
}

namespace {

std::uint64_t uabs(std::int64_t v) noexcept {
  return v < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

int valuation(std::uint64_t n, std::uint64_t p) noexcept {
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

std::uint64_t gcd_b_from(const BExponent& b, std::uint64_t um, std::uint64_t un,
                         const std::vector<PrimePower>& common) {
  std::uint64_t d = 1;
  for (const auto& [p, _] : common) {
    const int e1 = um == 0 ? std::numeric_limits<int>::max() / 2 : valuation(um, p);
    const int e2 = un == 0 ? std::numeric_limits<int>::max() / 2 : valuation(un, p);
    const int k = std::min(e1 / b.b1(), e2 / b.b2());
    for (int i = 0; i < k; ++i) d *= p;
  }
  return d;
}

}  // namespace

// Every prime dividing gcd_b(m, n) divides gcd(m, n), so only that (usually
// small) number is factored.
std::uint64_t gcd_b(const BExponent& b, std::int64_t m, std::int64_t n) {
  if (m == 0 && n == 0) throw UndefinedInputError("gcd_b(0, 0) is undefined");
  const std::uint64_t um = uabs(m);
  const std::uint64_t un = uabs(n);
  const std::uint64_t g = std::gcd(um, un);
  return gcd_b_from(b, um, un, factorize_trial(g));
}

std::uint64_t gcd_b(const BExponent& b, std::int64_t m, std::int64_t n, const PrimeTables& tables) {
  if (m == 0 && n == 0) throw UndefinedInputError("gcd_b(0, 0) is undefined");
  const std::uint64_t um = uabs(m);
  const std::uint64_t un = uabs(n);
  const std::uint64_t g = std::gcd(um, un);
  return gcd_b_from(b, um, un, tables.factorize(g));
}

void KahanSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

constexpr std::uint64_t kZetaTerms = 1'000'000;

double zeta_direct(int k) {
  // Skip the range whose terms vanish below 1e-30 relative to 1.
  std::uint64_t last = kZetaTerms;
  const double cutoff = std::pow(1e30, 1.0 / k);
  bool truncated = false;
  if (cutoff < static_cast<double>(kZetaTerms)) {
    last = static_cast<std::uint64_t>(cutoff) + 1;
    truncated = true;
  }
  KahanSum s;
  for (std::uint64_t n = last; n >= 1; --n) s.add(std::pow(static_cast<double>(n), -k));
  if (!truncated) {
    const double big_n = static_cast<double>(kZetaTerms);
    const double fn = std::pow(big_n, -k);
    s.add(big_n * fn / (k - 1));
    s.add(-fn / 2);
    s.add(k * fn / (12 * big_n));
  }
  return s.value();
}

}  // namespace

double zeta_int(int k) {
  if (k < 2) throw DomainError("zeta_int requires k >= 2, got " + std::to_string(k));
  constexpr int kCached = 128;
  if (k >= kCached) return 1.0 + std::pow(2.0, -k) + std::pow(3.0, -k);
  static std::mutex mu;
  static std::array<double, kCached> cache{};
  std::lock_guard lock(mu);
  if (cache[k] == 0.0) cache[k] = zeta_direct(k);
  return cache[k];
}

namespace {

constexpr double kZetaRelError = 2e-15;

double tail_sum(const EulerProduct& product, double cutoff) {
  if (product.bound_coefficient == 0.0) return 0.0;
  return product.bound_coefficient * std::pow(cutoff, 1.0 - product.decay) /
         (product.decay - 1.0);
}

}  // namespace

std::uint64_t euler_cutoff(const EulerProduct& product, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!(product.decay > 1.0)) throw DomainError("Euler product decay exponent must exceed 1");
  // Half of the budget goes to the analytic tail, the rest covers the zeta
  // constant and rounding.
  const double budget = 0.5 * std::log1p(tol) - kZetaRelError * product.zeta_power;
  if (!(budget > 0.0)) throw DomainError("tolerance not attainable in double precision");
  std::uint64_t cutoff = std::max<std::uint64_t>(product.bound_valid_above, 1);
  if (product.bound_coefficient > 0.0) {
    const double needed =
        std::pow(product.bound_coefficient / ((product.decay - 1.0) * budget),
                 1.0 / (product.decay - 1.0));
    if (!(needed < 1e18)) throw CapacityError("Euler product cutoff overflows");
    cutoff = std::max<std::uint64_t>(cutoff, static_cast<std::uint64_t>(std::ceil(needed)));
    cutoff = std::max<std::uint64_t>(cutoff, 2);
    while (tail_sum(product, static_cast<double>(cutoff)) > budget) ++cutoff;
  }
  return cutoff;
}

DensityResult euler_product_truncated(const EulerProduct& product, double tol,
                                      const PrimeTables& tables) {
  const std::uint64_t cutoff = euler_cutoff(product, tol);
  if (cutoff > tables.limit()) {
    throw CapacityError("Euler product needs primes up to " + std::to_string(cutoff) +
                        " but tables stop at " + std::to_string(tables.limit()));
  }
  KahanSum log_sum;
  double magnitude = 0.0;
  std::uint64_t last_prime = 0;
  for (std::uint32_t p : tables.primes()) {
    if (p > cutoff) break;
    last_prime = p;
    const PrimeFactor f = product.factor(p);
    if (f.base == 0.0) return {0.0, p, 0.0};
    if (!(f.base > 0.0) || f.base > 1.0 || !std::isfinite(f.log_correction)) {
      throw DomainError("Euler factor outside (0, 1] at p = " + std::to_string(p));
    }
    const double lb = std::log(f.base);
    log_sum.add(lb);
    log_sum.add(f.log_correction);
    magnitude += std::abs(lb) + std::abs(f.log_correction);
  }
  double zeta_term = 0.0;
  if (product.zeta_power != 0.0) {
    zeta_term = product.zeta_power * std::log(zeta_int(product.zeta_exponent));
    log_sum.add(-zeta_term);
    magnitude += std::abs(zeta_term);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double value = std::min(1.0, std::exp(log_sum.value()));
  const double slack = tail_sum(product, static_cast<double>(cutoff)) +
                       kZetaRelError * std::abs(product.zeta_power) +
                       8.0 * eps * magnitude + (magnitude > 0.0 ? 4.0 * eps : 0.0);
  const double bound = value * std::expm1(slack);
  if (bound > tol) throw DomainError("tolerance not attainable: rounding bound exceeds tol");
  return {value, last_prime, bound};
}

}  // namespace bvis

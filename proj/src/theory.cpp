#include "bvis/theory.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>

#include "bvis/binomial.hpp"

namespace bvis {

std::shared_ptr<const PrimeTables> shared_prime_tables(std::uint64_t min_limit) {
  static std::mutex mu;
  static std::shared_ptr<const PrimeTables> cached;
  std::lock_guard lock(mu);
  if (!cached || cached->limit() < min_limit) {
    const std::uint64_t grown = cached ? 2 * cached->limit() : std::uint64_t{1} << 16;
    cached = std::make_shared<const PrimeTables>(build_tables(std::max(min_limit, grown)));
  }
  return cached;
}

namespace {

// Largest cutoff the evaluators will sieve to on their own.
constexpr std::uint64_t kEvaluatorCutoffCap = 50'000'000;

std::uint64_t threshold_prime(double coefficient, int decay) {
  // Smallest integer p with coefficient * p^-decay <= 1/2.
  auto p = static_cast<std::uint64_t>(std::ceil(std::pow(2.0 * coefficient, 1.0 / decay)));
  return std::max<std::uint64_t>(p, 1);
}

// Evaluates the candidate with the smallest cutoff that meets tol.
DensityResult evaluate_best(const std::vector<EulerProduct>& candidates, double tol) {
  std::vector<std::pair<std::uint64_t, const EulerProduct*>> order;
  for (const auto& c : candidates) {
    try {
      order.emplace_back(euler_cutoff(c, tol), &c);
    } catch (const Error&) {
    }
  }
  std::sort(order.begin(), order.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  for (const auto& [cutoff, product] : order) {
    if (cutoff > kEvaluatorCutoffCap) continue;
    const auto tables = shared_prime_tables(std::max<std::uint64_t>(cutoff, 2));
    try {
      return euler_product_truncated(*product, tol, *tables);
    } catch (const DomainError&) {
      // Rounding ate the budget; try the next formulation.
    }
  }
  throw CapacityError("no Euler product formulation reaches the requested tolerance");
}

double inv_pow(std::uint64_t p, int k) { return std::pow(static_cast<double>(p), -k); }

}  // namespace

DensityResult density_watchpoints(const BExponent& b, std::uint64_t J, double tol) {
  const int k = b.sum();
  if (k >= 63) throw DomainError("b1 + b2 too large");
  const std::uint64_t max_j = std::uint64_t{1} << k;
  if (J < 1 || J > max_j) {
    throw DomainError("J must lie in [1, 2^(b1+b2)] = [1, " + std::to_string(max_j) + "], got " +
                      std::to_string(J));
  }
  if (J == max_j) return {0.0, 2, 0.0};  // the p = 2 factor vanishes
  const double j = static_cast<double>(J);
  const std::uint64_t valid = threshold_prime(j, k);

  EulerProduct direct;
  direct.factor = [=](std::uint64_t p) { return PrimeFactor{1.0 - j * inv_pow(p, k), 0.0}; };
  direct.bound_coefficient = 2.0 * j;
  direct.decay = k;
  direct.bound_valid_above = valid;

  // (1 - J x) / (1 - x)^J = 1 + O(J^2 x^2), x = p^-k.
  EulerProduct accelerated;
  accelerated.factor = [=](std::uint64_t p) {
    const double x = inv_pow(p, k);
    return PrimeFactor{1.0 - j * x, -j * std::log1p(-x)};
  };
  accelerated.bound_coefficient = j * j;
  accelerated.decay = 2.0 * k;
  accelerated.bound_valid_above = valid;
  accelerated.zeta_exponent = k;
  accelerated.zeta_power = j;

  return evaluate_best({direct, accelerated}, tol);
}

DensityResult density_walkers(const BExponent& b, std::uint64_t r, double tol) {
  if (r < 1) throw DomainError("the number of walkers must be at least 1");
  const int lo = b.lower();
  const int hi = b.upper();
  const double rr = static_cast<double>(r);
  const std::uint64_t valid = threshold_prime(rr, lo + hi);

  // 1 - p^-lo (1 - (1 - p^-hi)^r), with the inner power taken in log space.
  auto base = [=](std::uint64_t p) {
    const double miss = -std::expm1(rr * std::log1p(-inv_pow(p, hi)));
    return 1.0 - inv_pow(p, lo) * miss;
  };

  EulerProduct direct;
  direct.factor = [=](std::uint64_t p) { return PrimeFactor{base(p), 0.0}; };
  direct.bound_coefficient = 2.0 * rr;
  direct.decay = lo + hi;
  direct.bound_valid_above = valid;

  // Dividing by (1 - p^-(lo+hi))^r leaves 1 + O(r^2 p^-(lo+2hi)).
  EulerProduct accelerated;
  accelerated.factor = [=](std::uint64_t p) {
    return PrimeFactor{base(p), -rr * std::log1p(-inv_pow(p, lo + hi))};
  };
  accelerated.bound_coefficient = rr * (rr + 1.0);
  accelerated.decay = lo + 2 * hi;
  accelerated.bound_valid_above = valid;
  accelerated.zeta_exponent = lo + hi;
  accelerated.zeta_power = rr;

  return evaluate_best({direct, accelerated}, tol);
}

std::int64_t ShiftVector::max_abs() const noexcept {
  std::int64_t m = 0;
  for (std::int64_t v : values) m = std::max(m, v < 0 ? -v : v);
  return m;
}

namespace {

void require_above_shifts(const ShiftVector& s, std::int64_t n) {
  if (s.size() == 0) throw DomainError("shift vector must not be empty");
  if (n <= s.max_abs()) {
    throw DomainError("n = " + std::to_string(n) + " must exceed max |s_j| = " +
                      std::to_string(s.max_abs()));
  }
}

std::vector<std::uint64_t> primes_with_power(const std::vector<PrimePower>& f, int exponent) {
  std::vector<std::uint64_t> out;
  for (const auto& [p, e] : f) {
    if (e >= exponent) out.push_back(p);
  }
  return out;
}

struct Divisor {
  std::uint64_t d;
  double weight;  // mu(d) / d^b2
};

void enumerate(const std::vector<std::vector<Divisor>>& options, std::size_t j,
               std::vector<std::uint64_t>& chosen, double weight, KahanSum& acc) {
  if (j == options.size()) {
    acc.add(weight);
    return;
  }
  for (const auto& opt : options[j]) {
    bool coprime = true;
    for (std::uint64_t c : chosen) {
      if (std::gcd(c, opt.d) != 1) {
        coprime = false;
        break;
      }
    }
    if (!coprime) continue;
    chosen.push_back(opt.d);
    enumerate(options, j + 1, chosen, weight * opt.weight, acc);
    chosen.pop_back();
  }
}

}  // namespace

double f_bs_value(const BExponent& b, const ShiftVector& s, std::int64_t n) {
  require_above_shifts(s, n);
  std::vector<std::vector<Divisor>> options;
  for (std::int64_t sj : s.values) {
    const auto m = static_cast<std::uint64_t>(n - sj);
    const auto primes = primes_with_power(factorize_trial(m), b.b1());
    // Squarefree d with d^b1 | m are the subsets of `primes`.
    std::vector<Divisor> divs;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << primes.size()); ++mask) {
      std::uint64_t d = 1;
      int parity = 1;
      for (std::size_t i = 0; i < primes.size(); ++i) {
        if (mask >> i & 1) {
          d *= primes[i];
          parity = -parity;
        }
      }
      divs.push_back({d, parity * inv_pow(d, b.b2())});
    }
    options.push_back(std::move(divs));
  }
  KahanSum acc;
  std::vector<std::uint64_t> chosen;
  enumerate(options, 0, chosen, 1.0, acc);
  return acc.value();
}

double f_b_value(const BExponent& b, std::uint64_t n) {
  if (n < 1) throw DomainError("f_b is defined for n >= 1");
  const auto f = n <= (std::uint64_t{1} << 22) ? shared_prime_tables(n)->factorize(n)
                                                : factorize_trial(n);
  double v = 1.0;
  for (const auto& [p, e] : f) {
    if (e >= b.b1()) v *= 1.0 - inv_pow(p, b.b2());
  }
  return v;
}

double detail::f_bs_product_form(const BExponent& b, const ShiftVector& s, std::int64_t n,
                                 const PrimeTables& tables) {
  require_above_shifts(s, n);
  std::vector<std::uint64_t> hits;
  for (std::int64_t sj : s.values) {
    for (std::uint64_t p : primes_with_power(tables.factorize(static_cast<std::uint64_t>(n - sj)), b.b1())) {
      hits.push_back(p);
    }
  }
  std::sort(hits.begin(), hits.end());
  double v = 1.0;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    v *= 1.0 - static_cast<double>(j - i) * inv_pow(hits[i], b.b2());
    i = j;
  }
  return v;
}

MeanValueReport mean_value_check(const MeanValueParams& params, std::uint64_t x) {
  if (x < 100) throw DomainError("mean value check needs x >= 100");
  const BExponent& b = params.b;
  if (b.b1() > b.b2()) {
    throw DomainError("mean value lemmas assume b1 <= b2; swap the axes and use (" +
                      std::to_string(b.b2()) + "," + std::to_string(b.b1()) + ")");
  }
  MeanValueReport rep;
  rep.x = x;
  KahanSum sum;
  const double xd = static_cast<double>(x);
  if (params.kind == MeanValueKind::WatchpointsShifted) {
    const ShiftVector& s = params.shifts;
    if (s.size() == 0) throw DomainError("shift vector must not be empty");
    const auto shift = static_cast<std::uint64_t>(s.max_abs());
    const auto tables = shared_prime_tables(x + shift + 1);
    for (std::uint64_t n = shift + 1; n <= x; ++n) {
      sum.add(detail::f_bs_product_form(b, s, static_cast<std::int64_t>(n), *tables));
    }
    rep.density = density_watchpoints(b, s.size()).value;
    rep.error_scale = std::pow(std::log(xd), static_cast<double>(s.size()));
  } else {
    if (params.r < 1) throw DomainError("moment order r must be at least 1");
    const auto tables = shared_prime_tables(x + 1);
    const auto spf = tables->spf();
    const double r = static_cast<double>(params.r);
    for (std::uint64_t n = 1; n <= x; ++n) {
      double f = 1.0;
      for (std::uint64_t rest = n; rest > 1;) {
        const std::uint32_t p = spf[rest];
        int e = 0;
        while (rest % p == 0) {
          rest /= p;
          ++e;
        }
        if (e >= b.b1()) f *= 1.0 - inv_pow(p, b.b2());
      }
      sum.add(f == 1.0 ? 1.0 : std::pow(f, r));
    }
    rep.density = density_walkers(b, params.r).value;
    rep.error_scale = std::sqrt(xd);
  }
  rep.partial_sum = sum.value();
  rep.predicted_main = rep.density * xd;
  rep.abs_error = std::abs(rep.partial_sum - rep.predicted_main);
  rep.error_ratio = rep.abs_error / rep.error_scale;
  return rep;
}

std::vector<double> binomial_congruence_sums(double alpha, std::uint64_t n, std::uint64_t d) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (d < 1 || d > n) {
    throw DomainError("modulus d must satisfy 1 <= d <= n, got d = " + std::to_string(d));
  }
  const std::vector<double> row = binomial_pmf_row(n, alpha);
  std::vector<KahanSum> acc(d);
  for (std::uint64_t k = 0; k <= n; ++k) acc[k % d].add(row[k]);
  std::vector<double> out(d);
  for (std::uint64_t a = 0; a < d; ++a) out[a] = acc[a].value();
  return out;
}

double binomial_congruence_sum(double alpha, std::uint64_t n, std::uint64_t d, std::uint64_t a) {
  if (a >= d) throw DomainError("residue a must satisfy 0 <= a < d");
  return binomial_congruence_sums(alpha, n, d)[a];
}

double gcdb_conditioned_binomial_sum(const BExponent& b, double alpha, std::uint64_t m,
                                     std::int64_t n, const ShiftVector& s, const ShiftVector& t) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (s.size() != t.size()) throw DomainError("shift vectors s and t differ in length");
  require_above_shifts(s, n);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const std::int64_t ds = s[i] - s[j];
      const std::int64_t dt = t[i] - t[j];
      if ((ds == 0 && dt == 0) || gcd_b(b, ds, dt) != 1) {
        throw DomainError("shift pair (" + std::to_string(i) + "," + std::to_string(j) +
                          ") violates gcd_b(s_i - s_j, t_i - t_j) = 1");
      }
    }
  }
  const std::vector<double> row = m == 0 ? std::vector<double>{1.0} : binomial_pmf_row(m, alpha);
  KahanSum acc;
  for (std::uint64_t k = 0; k <= m; ++k) {
    bool ok = true;
    for (std::size_t j = 0; j < s.size() && ok; ++j) {
      ok = gcd_b(b, n - s[j], static_cast<std::int64_t>(k) - t[j]) == 1;
    }
    if (ok) acc.add(row[k]);
  }
  return acc.value();
}

}  // namespace bvis

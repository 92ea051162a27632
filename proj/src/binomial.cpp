#include "bvis/binomial.hpp"

#include <algorithm>
#include <cmath>

#include "bvis/error.hpp"
#include "bvis/numtheory.hpp"

namespace bvis {

std::vector<double> binomial_pmf_row(std::uint64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("binomial alpha must lie in (0, 1)");
  std::vector<double> w(n + 1, 0.0);
  const double odds = alpha / (1.0 - alpha);
  const auto mode = std::min<std::uint64_t>(
      n, static_cast<std::uint64_t>(std::floor(static_cast<double>(n + 1) * alpha)));
  w[mode] = 1.0;
  // w[k+1] / w[k] = (n - k) / (k + 1) * alpha / (1 - alpha)
  for (std::uint64_t k = mode; k < n; ++k) {
    w[k + 1] = w[k] * (static_cast<double>(n - k) / static_cast<double>(k + 1)) * odds;
  }
  for (std::uint64_t k = mode; k > 0; --k) {
    w[k - 1] = w[k] * (static_cast<double>(k) / static_cast<double>(n - k + 1)) / odds;
  }
  KahanSum total;
  for (double x : w) total.add(x);
  const double inv = 1.0 / total.value();
  for (double& x : w) x *= inv;
  return w;
}

}  // namespace bvis

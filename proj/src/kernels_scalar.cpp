#include <algorithm>
#include <numeric>
#include <string>

#include "bvis/kernels.hpp"
#include "bvis/walk.hpp"
#include "kernels_internal.hpp"

namespace bvis::kernels {

namespace {

constexpr std::uint64_t kMaxKernelLimit = (std::uint64_t{1} << 31) - 2;

void fill_table(const PrimeTables& primes, std::uint64_t limit, int exponent,
                std::span<const std::uint32_t> small, std::vector<std::uint64_t>& mask,
                std::vector<std::uint32_t>& large) {
  mask.assign(limit + 1, 0);
  large.assign(limit + 1, 1);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    std::uint64_t m = 0;
    std::uint32_t l = 1;
    const auto spf = primes.spf();
    for (std::uint64_t rest = n; rest > 1;) {
      const std::uint32_t p = spf[rest];
      int e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      if (e < exponent) continue;
      if (p <= small.back()) {
        const auto it = std::lower_bound(small.begin(), small.end(), p);
        m |= std::uint64_t{1} << (it - small.begin());
      } else {
        l *= p;
      }
    }
    mask[n] = m;
    large[n] = l;
  }
}

}  // namespace

VisibilityTables::VisibilityTables(const BExponent& b, std::uint64_t limit, std::uint64_t cap)
    : b_(b), limit_(limit) {
  if (limit > kMaxKernelLimit) {
    throw CapacityError("visibility tables limited to 2^31 - 2 entries, requested " +
                        std::to_string(limit));
  }
  // Table build needs at least the first kMaskPrimes primes.
  const PrimeTables primes = build_tables(std::max<std::uint64_t>(limit, 320), cap);
  const auto small = primes.primes().first(kMaskPrimes);
  fill_table(primes, limit, b.b1(), small, mask1_, large1_);
  if (b.b2() != b.b1()) fill_table(primes, limit, b.b2(), small, mask2_, large2_);
}

VisibilityView VisibilityTables::view() const noexcept {
  const bool shared = mask2_.empty();
  return {mask1_.data(), shared ? mask1_.data() : mask2_.data(), large1_.data(),
          shared ? large1_.data() : large2_.data(), static_cast<std::uint32_t>(limit_)};
}

bool VisibilityTables::visible(std::int64_t dx, std::int64_t dy) const {
  const std::uint64_t ax = dx < 0 ? -static_cast<std::uint64_t>(dx) : dx;
  const std::uint64_t ay = dy < 0 ? -static_cast<std::uint64_t>(dy) : dy;
  if (ax > limit_ || ay > limit_) throw CapacityError("displacement outside visibility tables");
  return detail::visible_scalar(view(), static_cast<std::uint32_t>(ax),
                                static_cast<std::uint32_t>(ay));
}

namespace detail {

std::uint64_t draw_steps_scalar(std::uint64_t state, std::uint64_t threshold, std::uint8_t* out,
                                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    state += kSplitMixIncrement;
    out[i] = (splitmix64_mix(state) >> 11) < threshold ? 1 : 0;
  }
  return state;
}

void and_visible_scalar(const VisibilityView& t, const std::int32_t* dx, const std::int32_t* dy,
                        std::uint8_t* mask, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const auto ax = static_cast<std::uint32_t>(dx[i] < 0 ? -dx[i] : dx[i]);
    const auto ay = static_cast<std::uint32_t>(dy[i] < 0 ? -dy[i] : dy[i]);
    mask[i] = visible_scalar(t, ax, ay) ? 1 : 0;
  }
}

}  // namespace detail

const KernelSet& scalar_kernels() noexcept {
  static const KernelSet set{Backend::Scalar, &detail::draw_steps_scalar,
                             &detail::and_visible_scalar};
  return set;
}

}  // namespace bvis::kernels

#pragma once

// Shared between the scalar kernels and the dispatch layer. Not included by
// the AVX2 translation unit, which keeps its own copies of these helpers so
// no inline function is ever emitted with AVX2 code.

#include <cstdint>
#include <numeric>

#include "bvis/kernels.hpp"

namespace bvis::kernels::detail {

inline bool visible_scalar(const VisibilityView& t, std::uint32_t ax, std::uint32_t ay) noexcept {
  if (ax == 0 || ay == 0) return ax + ay == 1;
  if (t.mask1[ax] & t.mask2[ay]) return false;
  const std::uint32_t l1 = t.large1[ax];
  const std::uint32_t l2 = t.large2[ay];
  return l1 == 1 || l2 == 1 || std::gcd(l1, l2) == 1;
}

std::uint64_t draw_steps_scalar(std::uint64_t state, std::uint64_t threshold, std::uint8_t* out,
                                std::size_t n);
void and_visible_scalar(const VisibilityView& t, const std::int32_t* dx, const std::int32_t* dy,
                        std::uint8_t* mask, std::size_t n);

#if defined(BVIS_HAVE_AVX2)
const KernelSet& avx2_kernel_set() noexcept;
#endif

}  // namespace bvis::kernels::detail

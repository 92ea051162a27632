// AVX2 variants. This file is compiled with -mavx2 and only reached after a
// runtime CPU check, so it must not instantiate inline functions shared with
// other translation units.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "bvis/kernels.hpp"

namespace bvis::kernels::detail {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kMul1 = 0xBF58476D1CE4E5B9ULL;
constexpr std::uint64_t kMul2 = 0x94D049BB133111EBULL;

inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * kMul1;
  z = (z ^ (z >> 27)) * kMul2;
  return z ^ (z >> 31);
}

inline std::uint32_t gcd32(std::uint32_t a, std::uint32_t b) {
  while (b != 0) {
    const std::uint32_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Low 64 bits of a * c per lane, from three 32x32->64 products.
inline __m256i mullo64(__m256i a, std::uint64_t c) {
  const __m256i c_lo = _mm256_set1_epi64x(static_cast<long long>(c & 0xFFFFFFFFULL));
  const __m256i c_hi = _mm256_set1_epi64x(static_cast<long long>(c >> 32));
  const __m256i lo = _mm256_mul_epu32(a, c_lo);
  const __m256i cross =
      _mm256_add_epi64(_mm256_mul_epu32(_mm256_srli_epi64(a, 32), c_lo), _mm256_mul_epu32(a, c_hi));
  return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix4(__m256i z) {
  z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)), kMul1);
  z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)), kMul2);
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

std::uint64_t draw_steps_avx2(std::uint64_t state, std::uint64_t threshold, std::uint8_t* out,
                              std::size_t n) {
  std::size_t i = 0;
  if (n >= 8) {
    // Two interleaved vectors hold the states for draws i+1 .. i+8.
    __m256i s0 = _mm256_setr_epi64x(
        static_cast<long long>(state + kGamma), static_cast<long long>(state + 2 * kGamma),
        static_cast<long long>(state + 3 * kGamma), static_cast<long long>(state + 4 * kGamma));
    __m256i s1 = _mm256_add_epi64(s0, _mm256_set1_epi64x(static_cast<long long>(4 * kGamma)));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(8 * kGamma));
    const __m256i thr = _mm256_set1_epi64x(static_cast<long long>(threshold));
    for (; i + 8 <= n; i += 8) {
      // (z >> 11) < 2^53, so the signed compare is exact.
      const __m256i u0 = _mm256_srli_epi64(mix4(s0), 11);
      const __m256i u1 = _mm256_srli_epi64(mix4(s1), 11);
      const int m0 = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(thr, u0)));
      const int m1 = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(thr, u1)));
      const int m = m0 | (m1 << 4);
      for (int l = 0; l < 8; ++l) out[i + l] = static_cast<std::uint8_t>((m >> l) & 1);
      s0 = _mm256_add_epi64(s0, step);
      s1 = _mm256_add_epi64(s1, step);
    }
    state += static_cast<std::uint64_t>(i) * kGamma;
  }
  for (; i < n; ++i) {
    state += kGamma;
    out[i] = (mix(state) >> 11) < threshold ? 1 : 0;
  }
  return state;
}

inline bool visible_one(const VisibilityView& t, std::uint32_t ax, std::uint32_t ay) {
  if (ax == 0 || ay == 0) return ax + ay == 1;
  if (t.mask1[ax] & t.mask2[ay]) return false;
  const std::uint32_t l1 = t.large1[ax];
  const std::uint32_t l2 = t.large2[ay];
  return l1 == 1 || l2 == 1 || gcd32(l1, l2) == 1;
}

void and_visible_avx2(const VisibilityView& t, const std::int32_t* dx, const std::int32_t* dy,
                      std::uint8_t* mask, std::size_t n) {
  const auto* mask1 = reinterpret_cast<const long long*>(t.mask1);
  const auto* mask2 = reinterpret_cast<const long long*>(t.mask2);
  const auto* large1 = reinterpret_cast<const int*>(t.large1);
  const auto* large2 = reinterpret_cast<const int*>(t.large2);
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i ax = _mm256_abs_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(dx + i)));
    const __m256i ay = _mm256_abs_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(dy + i)));

    const __m256i degenerate = _mm256_or_si256(_mm256_cmpeq_epi32(ax, zero), _mm256_cmpeq_epi32(ay, zero));
    const __m256i unit = _mm256_cmpeq_epi32(_mm256_add_epi32(ax, ay), one);

    const __m256i l1 = _mm256_i32gather_epi32(large1, ax, 4);
    const __m256i l2 = _mm256_i32gather_epi32(large2, ay, 4);
    const __m256i easy = _mm256_or_si256(_mm256_cmpeq_epi32(l1, one), _mm256_cmpeq_epi32(l2, one));

    const __m128i ax_lo = _mm256_castsi256_si128(ax);
    const __m128i ax_hi = _mm256_extracti128_si256(ax, 1);
    const __m128i ay_lo = _mm256_castsi256_si128(ay);
    const __m128i ay_hi = _mm256_extracti128_si256(ay, 1);
    const __m256i both_lo = _mm256_and_si256(_mm256_i32gather_epi64(mask1, ax_lo, 8),
                                             _mm256_i32gather_epi64(mask2, ay_lo, 8));
    const __m256i both_hi = _mm256_and_si256(_mm256_i32gather_epi64(mask1, ax_hi, 8),
                                             _mm256_i32gather_epi64(mask2, ay_hi, 8));
    const int small_ok =
        _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(both_lo, zero))) |
        (_mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(both_hi, zero))) << 4);

    const int deg_bits = _mm256_movemask_ps(_mm256_castsi256_ps(degenerate));
    const int unit_bits = _mm256_movemask_ps(_mm256_castsi256_ps(unit));
    const int easy_bits = _mm256_movemask_ps(_mm256_castsi256_ps(easy));

    int vis = (~deg_bits & small_ok & easy_bits) | (deg_bits & unit_bits);
    int pending = ~deg_bits & small_ok & ~easy_bits & 0xFF;
    while (pending != 0) {
      const int l = __builtin_ctz(static_cast<unsigned>(pending));
      pending &= pending - 1;
      const auto a = static_cast<std::uint32_t>(dx[i + l] < 0 ? -dx[i + l] : dx[i + l]);
      const auto b = static_cast<std::uint32_t>(dy[i + l] < 0 ? -dy[i + l] : dy[i + l]);
      if (gcd32(t.large1[a], t.large2[b]) == 1) vis |= 1 << l;
    }
    for (int l = 0; l < 8; ++l) mask[i + l] &= static_cast<std::uint8_t>((vis >> l) & 1);
  }
  for (; i < n; ++i) {
    if (!mask[i]) continue;
    const auto ax = static_cast<std::uint32_t>(dx[i] < 0 ? -dx[i] : dx[i]);
    const auto ay = static_cast<std::uint32_t>(dy[i] < 0 ? -dy[i] : dy[i]);
    mask[i] = visible_one(t, ax, ay) ? 1 : 0;
  }
}

}  // namespace

const KernelSet& avx2_kernel_set() noexcept {
  static const KernelSet set{Backend::Avx2, &draw_steps_avx2, &and_visible_avx2};
  return set;
}

}  // namespace bvis::kernels::detail

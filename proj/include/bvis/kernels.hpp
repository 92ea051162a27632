#pragma once

// Inner loops of the Monte Carlo simulators. Every kernel has a scalar
// reference implementation; wider variants are selected at runtime and must
// produce bit-identical output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bvis/numtheory.hpp"

namespace bvis::kernels {

/// Number of small primes tracked as bits in VisibilityTables masks.
inline constexpr int kMaskPrimes = 64;

/// Raw view handed to kernels. Entry n describes |delta| = n:
///  - bit i of mask_k[n] is set iff the i-th prime p satisfies p^k | n,
///  - large_k[n] is the product of the remaining primes p with p^k | n.
/// Entry 0 holds mask 0 and large 1; zero deltas never reach the lookups.
struct VisibilityView {
  const std::uint64_t* mask1;
  const std::uint64_t* mask2;
  const std::uint32_t* large1;
  const std::uint32_t* large2;
  std::uint32_t limit;
};

/// Per-exponent lookup tables that reduce "gcd_b(dx, dy) == 1" to a mask test
/// plus, rarely, one 32-bit gcd.
class VisibilityTables {
 public:
  /// Covers |dx|, |dy| <= limit. Throws CapacityError when limit >= 2^31 or
  /// exceeds `cap`.
  VisibilityTables(const BExponent& b, std::uint64_t limit, std::uint64_t cap = kDefaultTableCap);

  const BExponent& b() const noexcept { return b_; }
  std::uint64_t limit() const noexcept { return limit_; }
  VisibilityView view() const noexcept;

  /// Reference predicate, equal to is_b_visible for a nonzero displacement
  /// and false for (0, 0).
  bool visible(std::int64_t dx, std::int64_t dy) const;

 private:
  BExponent b_;
  std::uint64_t limit_;
  std::vector<std::uint64_t> mask1_;
  std::vector<std::uint32_t> large1_;
  // Empty when b1 == b2 (only b = (1, 1)); the view then aliases table 1.
  std::vector<std::uint64_t> mask2_;
  std::vector<std::uint32_t> large2_;
};

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend backend) noexcept;

struct KernelSet {
  Backend backend;

  /// out[i] = 1 iff the (i+1)-th SplitMix64 draw after `state` maps to a
  /// uniform below alpha, i.e. (z >> 11) < threshold. Returns the advanced
  /// state.
  std::uint64_t (*draw_steps)(std::uint64_t state, std::uint64_t threshold, std::uint8_t* out,
                              std::size_t n);

  /// mask[i] &= visible(dx[i], dy[i]). Requires |dx[i]|, |dy[i]| <= limit.
  void (*and_visible)(const VisibilityView& tables, const std::int32_t* dx, const std::int32_t* dy,
                      std::uint8_t* mask, std::size_t n);
};

const KernelSet& scalar_kernels() noexcept;

/// nullptr when the AVX2 variant was not built or the CPU lacks AVX2.
const KernelSet* avx2_kernels() noexcept;

/// Widest supported variant.
const KernelSet& best_kernels() noexcept;

/// Throws UnsupportedInputError when the backend is unavailable here.
const KernelSet& kernels_for(Backend backend);

std::vector<Backend> available_backends();

// Span front ends.
std::uint64_t draw_steps(const KernelSet& k, std::uint64_t state, std::uint64_t threshold,
                         std::span<std::uint8_t> out);
void and_visible(const KernelSet& k, const VisibilityTables& tables,
                 std::span<const std::int32_t> dx, std::span<const std::int32_t> dy,
                 std::span<std::uint8_t> mask);

}  // namespace bvis::kernels

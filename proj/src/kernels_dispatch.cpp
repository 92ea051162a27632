#include <stdexcept>
#include <string>

#include "bvis/kernels.hpp"
#include "kernels_internal.hpp"

namespace bvis::kernels {

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelSet* avx2_kernels() noexcept {
#if defined(BVIS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_kernel_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& best_kernels() noexcept {
  if (const KernelSet* k = avx2_kernels()) return *k;
  return scalar_kernels();
}

const KernelSet& kernels_for(Backend backend) {
  if (backend == Backend::Scalar) return scalar_kernels();
  if (const KernelSet* k = avx2_kernels()) return *k;
  throw UnsupportedInputError("kernel backend '" + std::string(backend_name(backend)) +
                              "' is not available on this machine");
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (avx2_kernels() != nullptr) out.push_back(Backend::Avx2);
  return out;
}

std::uint64_t draw_steps(const KernelSet& k, std::uint64_t state, std::uint64_t threshold,
                         std::span<std::uint8_t> out) {
  return k.draw_steps(state, threshold, out.data(), out.size());
}

void and_visible(const KernelSet& k, const VisibilityTables& tables,
                 std::span<const std::int32_t> dx, std::span<const std::int32_t> dy,
                 std::span<std::uint8_t> mask) {
  if (dx.size() != mask.size() || dy.size() != mask.size()) {
    throw std::invalid_argument("and_visible: span sizes differ");
  }
  const VisibilityView view = tables.view();
  k.and_visible(view, dx.data(), dy.data(), mask.data(), mask.size());
}

}  // namespace bvis::kernels

#include "bvis/walk.hpp"

#include <cmath>
#include <string>

namespace bvis {

std::pair<double, RngState> next_uniform(RngState s) noexcept {
  const std::uint64_t z = next_u64(s);
  return {to_unit(z), s};
}

std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t walker,
                                std::uint64_t walkers_per_trial) {
  const std::uint64_t index = trial * walkers_per_trial + walker + 1;
  return splitmix64_mix(master + index * kSplitMixIncrement);
}

WalkerConfig::WalkerConfig(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie strictly between 0 and 1, got " + std::to_string(alpha));
  }
  // alpha * 2^53 is exact; an integer u satisfies u < t iff u < ceil(t).
  threshold_ = static_cast<std::uint64_t>(std::ceil(std::ldexp(alpha, 53)));
}

WalkPositions walk_positions(const WalkerConfig& cfg, std::uint64_t seed, std::uint64_t n) {
  if (n == 0) throw DomainError("walk needs at least one step");
  return WalkPositions(cfg, seed, n);
}

}  // namespace bvis

#pragma once

#include <cstdint>
#include <iterator>
#include <utility>

#include "bvis/visibility.hpp"

namespace bvis {

inline constexpr std::uint64_t kSplitMixIncrement = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer applied to an already advanced state.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct RngState {
  std::uint64_t state = 0;
};

/// Advances the state once and returns the next 64-bit output.
constexpr std::uint64_t next_u64(RngState& s) noexcept {
  s.state += kSplitMixIncrement;
  return splitmix64_mix(s.state);
}

/// Top 53 bits of the next output scaled into [0, 1).
constexpr double to_unit(std::uint64_t z) noexcept {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::pair<double, RngState> next_uniform(RngState s) noexcept;

/// The (trial * walkers_per_trial + walker + 1)-th SplitMix64 output of the
/// stream seeded with `master`. Computed in O(1).
std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t walker,
                                std::uint64_t walkers_per_trial);

/// Probability of the (1, 0) step, strictly inside (0, 1).
class WalkerConfig {
 public:
  explicit WalkerConfig(double alpha);
  double alpha() const noexcept { return alpha_; }

  /// u < alpha  <=>  (z >> 11) < threshold() for u = to_unit(z).
  std::uint64_t threshold() const noexcept { return threshold_; }

 private:
  double alpha_;
  std::uint64_t threshold_;
};

/// Lazy alpha-random walk from the origin. Each call to next() consumes one
/// uniform and returns P_1, P_2, ... in order.
class WalkStream {
 public:
  WalkStream(const WalkerConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_{seed} {}

  LatticePoint next() noexcept {
    if (to_unit(next_u64(rng_)) < cfg_.alpha()) {
      ++pos_.x;
    } else {
      ++pos_.y;
    }
    ++steps_;
    return pos_;
  }

  LatticePoint position() const noexcept { return pos_; }
  std::uint64_t steps() const noexcept { return steps_; }
  RngState rng() const noexcept { return rng_; }

 private:
  WalkerConfig cfg_;
  RngState rng_;
  LatticePoint pos_{};
  std::uint64_t steps_ = 0;
};

/// Input range over the first n positions of a walk; nothing is materialized.
class WalkPositions {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = LatticePoint;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const LatticePoint& operator*() const noexcept { return current_; }
    iterator& operator++() noexcept {
      if (++index_ < owner_->n_) current_ = owner_->stream_.next();
      return *this;
    }
    void operator++(int) noexcept { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) noexcept {
      return it.done();
    }

   private:
    friend class WalkPositions;
    bool done() const noexcept { return owner_ == nullptr || index_ >= owner_->n_; }
    explicit iterator(WalkPositions* owner) : owner_(owner) {
      if (owner_->n_ > 0) current_ = owner_->stream_.next();
    }
    WalkPositions* owner_ = nullptr;
    std::uint64_t index_ = 0;
    LatticePoint current_{};
  };

  WalkPositions(const WalkerConfig& cfg, std::uint64_t seed, std::uint64_t n)
      : stream_(cfg, seed), n_(n) {}

  /// Single pass: begin() may be called once.
  iterator begin() { return iterator(this); }
  std::default_sentinel_t end() const noexcept { return {}; }

 private:
  WalkStream stream_;
  std::uint64_t n_;
};

/// Throws DomainError when n == 0.
WalkPositions walk_positions(const WalkerConfig& cfg, std::uint64_t seed, std::uint64_t n);

}  // namespace bvis

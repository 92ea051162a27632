#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bvis/error.hpp"
#include "bvis/numtheory.hpp"

namespace bvis {

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

std::string to_string(const LatticePoint& p);

/// Fast criterion: gcd_b(p1 - q1, p2 - q2) = 1 when both coordinates differ,
/// otherwise the shared-coordinate rule (neighbours at distance one only).
/// Throws UndefinedInputError when P == Q.
bool is_b_visible(const BExponent& b, const LatticePoint& p, const LatticePoint& q);

/// Direct check of the curve definition: no lattice point strictly inside the
/// box between Q and P lies on a1 (y - q2)^b1 = a2 (x - q1)^b2 with
/// a1 = (p1 - q1)^b2 and a2 = (p2 - q2)^b1. Exact integer arithmetic.
/// Only positive-quadrant displacements (p1 > q1, p2 > q2) are accepted.
bool curve_oracle_visible(const BExponent& b, const LatticePoint& p, const LatticePoint& q);

namespace detail {
/// Same check forced through arbitrary-precision integers, for tests.
bool curve_oracle_visible_bigint(const BExponent& b, const LatticePoint& p, const LatticePoint& q);
}  // namespace detail

/// A set of watchpoints that are pairwise distinct and mutually b-visible.
class WatchpointSet {
 public:
  const BExponent& b() const noexcept { return b_; }
  const std::vector<LatticePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  friend WatchpointSet validate_watchpoint_set(const BExponent&, std::vector<LatticePoint>);
  WatchpointSet(BExponent b, std::vector<LatticePoint> pts) : b_(b), points_(std::move(pts)) {}
  BExponent b_;
  std::vector<LatticePoint> points_;
};

/// Raised by validate_watchpoint_set. Carries the first violating pair (by
/// index into the input list) when the failure is pairwise.
class InvalidWatchpointSet : public Error {
 public:
  enum class Reason { Empty, Duplicate, NotVisible, TooMany };

  InvalidWatchpointSet(Reason reason, std::string message,
                       std::optional<std::pair<std::size_t, std::size_t>> pair = std::nullopt)
      : Error(std::move(message)), reason_(reason), pair_(pair) {}

  Reason reason() const noexcept { return reason_; }
  const std::optional<std::pair<std::size_t, std::size_t>>& pair() const noexcept { return pair_; }

 private:
  Reason reason_;
  std::optional<std::pair<std::size_t, std::size_t>> pair_;
};

/// Checks cardinality <= 2^(b1+b2), distinctness and condition (*), in that
/// order, scanning pairs (i, j) with i < j lexicographically.
WatchpointSet validate_watchpoint_set(const BExponent& b, std::vector<LatticePoint> points);

}  // namespace bvis

#include "bvis/visibility.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace bvis {

std::string to_string(const LatticePoint& p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

bool is_b_visible(const BExponent& b, const LatticePoint& p, const LatticePoint& q) {
  if (p == q) throw UndefinedInputError("visibility of a point from itself is undefined");
  const std::int64_t dx = p.x - q.x;
  const std::int64_t dy = p.y - q.y;
  if (dx == 0) return dy == 1 || dy == -1;
  if (dy == 0) return dx == 1 || dx == -1;
  return gcd_b(b, dx, dy) == 1;
}

namespace {

using boost::multiprecision::cpp_int;
__extension__ typedef unsigned __int128 u128;

template <class Int>
Int ipow(Int base, int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Largest t with t^k <= v, v >= 0.
template <class Int>
Int iroot(const Int& v, int k) {
  if (k == 1 || v < 2) return v;
  Int lo = 1;
  Int hi = 1;
  while (ipow<Int>(hi, k) <= v) hi *= 2;
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    if (ipow<Int>(mid, k) <= v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// For every interior abscissa, solve the curve equation for the ordinate and
// test whether it is a lattice point strictly inside the box.
template <class Int>
bool curve_has_interior_point(int b1, int b2, std::int64_t dx, std::int64_t dy) {
  const Int a1 = ipow<Int>(Int(dx), b2);
  const Int a2 = ipow<Int>(Int(dy), b1);
  for (std::int64_t rx = 1; rx < dx; ++rx) {
    const Int rhs = a2 * ipow<Int>(Int(rx), b2);
    if (rhs % a1 != 0) continue;
    const Int target = rhs / a1;  // ry^b1
    const Int ry = iroot<Int>(target, b1);
    if (ipow<Int>(ry, b1) == target && ry > 0 && ry < Int(dy)) return true;
  }
  return false;
}

void check_oracle_domain(const LatticePoint& p, const LatticePoint& q) {
  if (p == q) throw UndefinedInputError("visibility of a point from itself is undefined");
  if (!(p.x > q.x && p.y > q.y)) {
    throw UnsupportedInputError("curve oracle only handles displacements with p1 > q1 and p2 > q2");
  }
}

}  // namespace

bool curve_oracle_visible(const BExponent& b, const LatticePoint& p, const LatticePoint& q) {
  check_oracle_domain(p, q);
  const std::int64_t dx = p.x - q.x;
  const std::int64_t dy = p.y - q.y;
  // Every intermediate is bounded by dx^b2 * dy^b1; the root search may
  // overshoot by a factor 2^b1.
  const double bits = b.b2() * std::log2(static_cast<double>(dx)) +
                      b.b1() * std::log2(static_cast<double>(dy));
  if (bits + b.b1() + 2 < 126.0) {
    return !curve_has_interior_point<u128>(b.b1(), b.b2(), dx, dy);
  }
  return !curve_has_interior_point<cpp_int>(b.b1(), b.b2(), dx, dy);
}

namespace detail {
bool curve_oracle_visible_bigint(const BExponent& b, const LatticePoint& p, const LatticePoint& q) {
  check_oracle_domain(p, q);
  return !curve_has_interior_point<cpp_int>(b.b1(), b.b2(), p.x - q.x, p.y - q.y);
}
}  // namespace detail

WatchpointSet validate_watchpoint_set(const BExponent& b, std::vector<LatticePoint> points) {
  using R = InvalidWatchpointSet::Reason;
  if (points.empty()) throw InvalidWatchpointSet(R::Empty, "watchpoint set is empty");
  const std::uint64_t max_size = b.sum() < 63 ? std::uint64_t{1} << b.sum() : ~std::uint64_t{0};
  if (points.size() > max_size) {
    throw InvalidWatchpointSet(R::TooMany, "watchpoint set has " + std::to_string(points.size()) +
                                               " points, more than 2^(b1+b2) = " +
                                               std::to_string(max_size));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw InvalidWatchpointSet(R::Duplicate, "duplicate watchpoint " + to_string(points[i]),
                                   std::pair{i, j});
      }
      if (!is_b_visible(b, points[i], points[j])) {
        throw InvalidWatchpointSet(R::NotVisible,
                                   "watchpoints " + to_string(points[i]) + " and " +
                                       to_string(points[j]) + " are not mutually b-visible",
                                   std::pair{i, j});
      }
    }
  }
  return WatchpointSet(b, std::move(points));
}

}  // namespace bvis

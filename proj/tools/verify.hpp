#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvis/numtheory.hpp"
#include "bvis/theory.hpp"

namespace bvis::cli {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // violations, or an error magnitude
  double tolerance = 0.0;  // pass iff measured <= tolerance
};

bool all_passed(const std::vector<Check>& checks);

/// Random-case suites for gcd_b: brute-force equivalence, the divisor
/// characterization, invariance under m -> m + a n (b1 <= b2), and
/// bi-multiplicativity.
std::vector<Check> verify_gcd_properties(std::uint64_t cases, std::uint64_t seed);

/// Compares is_b_visible with the curve oracle on every (dx, dy) in
/// [1, box]^2, and checks that visibility is symmetric on a centred box.
std::vector<Check> verify_visibility_oracle(const BExponent& b, int box);

std::vector<Check> verify_congruence_sum(double alpha, std::uint64_t n, std::uint64_t d,
                                         double tolerance);

/// Bounded normalized error at x, and no growth worse than `growth` from
/// x / 100 to x when x / 100 >= 100.
std::vector<Check> verify_mean_value(const MeanValueParams& params, std::uint64_t x,
                                     double ratio_bound, double growth);

}  // namespace bvis::cli

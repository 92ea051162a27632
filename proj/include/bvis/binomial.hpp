#pragma once

#include <cstdint>
#include <vector>

namespace bvis {

/// Probability mass of Binomial(n, alpha) at k = 0..n.
///
/// Weights are built by the ratio recurrence outward from the mode and
/// normalized by their total, so no term underflows before it is negligible
/// and the row sums to one up to a few ulps.
std::vector<double> binomial_pmf_row(std::uint64_t n, double alpha);

}  // namespace bvis

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "bvis/kernels.hpp"
#include "bvis/numtheory.hpp"
#include "bvis/visibility.hpp"
#include "bvis/walk.hpp"

namespace bvis {

struct TrialResult {
  std::uint64_t trial_index = 0;
  std::uint64_t visible_count = 0;
  std::uint64_t steps = 0;
  double proportion = 0.0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// One walker observed from a validated watchpoint set.
struct WatchpointsMode {
  WatchpointSet watchpoints;
  WalkerConfig walker;
};

/// r independent walkers observed from the origin.
struct WalkersMode {
  std::vector<WalkerConfig> walkers;
};

struct SimulationSpec {
  BExponent b;
  std::variant<WatchpointsMode, WalkersMode> mode;
  std::uint64_t steps = 1;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;

  /// Throws DomainError on n = 0, T = 0, an empty walker list or a
  /// watchpoint set built for a different b.
  void validate() const;
  std::uint64_t walkers_per_trial() const;
};

struct AggregateResult {
  double mean_proportion = 0.0;
  double sample_std = 0.0;
  std::uint64_t trials = 0;
  DensityResult theory;
  double abs_deviation = 0.0;
  std::vector<TrialResult> per_trial;  // ascending trial index
};

/// Counts steps i = 1..n at which P_i is b-visible from every watchpoint.
/// A step that lands on a watchpoint is not visible.
class WatchpointSimulator {
 public:
  WatchpointSimulator(const WatchpointSet& watchpoints, const WalkerConfig& walker,
                      std::uint64_t steps,
                      const kernels::KernelSet& kernels = kernels::best_kernels());

  TrialResult run(std::uint64_t seed, std::uint64_t trial_index = 0) const;

 private:
  std::vector<LatticePoint> points_;
  WalkerConfig walker_;
  std::uint64_t steps_;
  const kernels::KernelSet* kernels_;
  std::shared_ptr<const kernels::VisibilityTables> tables_;
};

/// Counts steps at which all walkers are simultaneously b-visible from the
/// origin. Walker j draws from its own SplitMix64 stream.
class WalkersSimulator {
 public:
  WalkersSimulator(const BExponent& b, std::vector<WalkerConfig> walkers, std::uint64_t steps,
                   const kernels::KernelSet& kernels = kernels::best_kernels());

  std::size_t walkers() const noexcept { return walkers_.size(); }
  TrialResult run(std::span<const std::uint64_t> walker_seeds, std::uint64_t trial_index = 0) const;

 private:
  std::vector<WalkerConfig> walkers_;
  std::uint64_t steps_;
  const kernels::KernelSet* kernels_;
  std::shared_ptr<const kernels::VisibilityTables> tables_;
};

TrialResult simulate_watchpoint_run(const BExponent& b, const WatchpointSet& watchpoints,
                                    const WalkerConfig& walker, std::uint64_t steps,
                                    std::uint64_t seed);

TrialResult simulate_walkers_run(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps, std::span<const std::uint64_t> walker_seeds);

/// Seeds walker j with derive_trial_seed(master, trial, j, r).
TrialResult simulate_walkers_run(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps, std::uint64_t master, std::uint64_t trial);

struct AggregateOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  const kernels::KernelSet* kernels = nullptr;  // nullptr: best available
};

/// Runs all trials (possibly concurrently) and reduces them in ascending
/// trial order, so the result does not depend on scheduling.
AggregateResult aggregate_trials(const SimulationSpec& spec, const DensityResult& theory,
                                 const AggregateOptions& options = {});

inline constexpr std::uint64_t kExactStepCap = 2000;

/// (1/n) sum_i P(P_i is b-visible from W), by exact binomial sums. Uses the
/// same step convention as the simulator. Throws CapacityError for n > 2000.
double exact_expectation_watchpoints(const BExponent& b, const WatchpointSet& watchpoints,
                                     const WalkerConfig& walker, std::uint64_t steps);

/// (1/n) sum_i prod_j P(P_i^(j) is b-visible from the origin).
double exact_expectation_walkers(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps);

/// Per-step probabilities P(P_i visible from the origin), i = 1..n, for one
/// walker; exposes the one-walker factor of the product form.
std::vector<double> origin_visibility_probabilities(const BExponent& b, const WalkerConfig& walker,
                                                    std::uint64_t steps);

}  // namespace bvis

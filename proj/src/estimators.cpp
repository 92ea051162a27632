#include "bvis/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>

#include "bvis/binomial.hpp"

namespace bvis {

namespace {

constexpr std::size_t kBlock = 4096;

std::uint64_t iabs(std::int64_t v) {
  return v < 0 ? -static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

std::uint64_t count_set(std::span<const std::uint8_t> mask) {
  std::uint64_t c = 0;
  for (std::uint8_t m : mask) c += m;
  return c;
}

TrialResult make_result(std::uint64_t trial, std::uint64_t count, std::uint64_t steps) {
  return {trial, count, steps, static_cast<double>(count) / static_cast<double>(steps)};
}

}  // namespace

void SimulationSpec::validate() const {
  if (steps == 0) throw DomainError("simulation needs at least one step");
  if (trials == 0) throw DomainError("simulation needs at least one trial");
  if (const auto* w = std::get_if<WatchpointsMode>(&mode)) {
    if (!(w->watchpoints.b() == b)) {
      throw DomainError("watchpoint set was validated for a different b");
    }
  } else if (std::get<WalkersMode>(mode).walkers.empty()) {
    throw DomainError("walkers mode needs at least one walker");
  }
}

std::uint64_t SimulationSpec::walkers_per_trial() const {
  if (const auto* w = std::get_if<WalkersMode>(&mode)) return w->walkers.size();
  return 1;
}

WatchpointSimulator::WatchpointSimulator(const WatchpointSet& watchpoints,
                                         const WalkerConfig& walker, std::uint64_t steps,
                                         const kernels::KernelSet& kernels)
    : points_(watchpoints.points()), walker_(walker), steps_(steps), kernels_(&kernels) {
  if (steps == 0) throw DomainError("simulation needs at least one step");
  std::uint64_t reach = 0;
  for (const auto& p : points_) reach = std::max({reach, iabs(p.x), iabs(p.y)});
  if (reach > std::numeric_limits<std::int32_t>::max() / 2 ||
      steps > std::numeric_limits<std::int32_t>::max() / 2) {
    throw CapacityError("watchpoint offsets or step count too large for the simulator");
  }
  tables_ = std::make_shared<const kernels::VisibilityTables>(watchpoints.b(), steps + reach + 1);
}

TrialResult WatchpointSimulator::run(std::uint64_t seed, std::uint64_t trial_index) const {
  const std::size_t block = static_cast<std::size_t>(std::min<std::uint64_t>(steps_, kBlock));
  std::vector<std::uint8_t> right(block), mask(block);
  std::vector<std::int32_t> xs(block), ys(block), dx(block), dy(block);
  const kernels::VisibilityView view = tables_->view();

  std::uint64_t state = seed;
  std::int64_t x = 0;
  std::uint64_t visible = 0;
  for (std::uint64_t start = 0; start < steps_; start += block) {
    const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(block, steps_ - start));
    state = kernels_->draw_steps(state, walker_.threshold(), right.data(), len);
    for (std::size_t k = 0; k < len; ++k) {
      x += right[k];
      xs[k] = static_cast<std::int32_t>(x);
      ys[k] = static_cast<std::int32_t>(static_cast<std::int64_t>(start + k + 1) - x);
    }
    std::fill_n(mask.begin(), len, std::uint8_t{1});
    for (const auto& w : points_) {
      const auto u = static_cast<std::int32_t>(w.x);
      const auto v = static_cast<std::int32_t>(w.y);
      for (std::size_t k = 0; k < len; ++k) {
        dx[k] = xs[k] - u;
        dy[k] = ys[k] - v;
      }
      kernels_->and_visible(view, dx.data(), dy.data(), mask.data(), len);
    }
    visible += count_set(std::span(mask).first(len));
  }
  return make_result(trial_index, visible, steps_);
}

WalkersSimulator::WalkersSimulator(const BExponent& b, std::vector<WalkerConfig> walkers,
                                   std::uint64_t steps, const kernels::KernelSet& kernels)
    : walkers_(std::move(walkers)), steps_(steps), kernels_(&kernels) {
  if (steps == 0) throw DomainError("simulation needs at least one step");
  if (walkers_.empty()) throw DomainError("walkers mode needs at least one walker");
  if (steps > std::numeric_limits<std::int32_t>::max() / 2) {
    throw CapacityError("step count too large for the simulator");
  }
  tables_ = std::make_shared<const kernels::VisibilityTables>(b, steps + 1);
}

TrialResult WalkersSimulator::run(std::span<const std::uint64_t> walker_seeds,
                                  std::uint64_t trial_index) const {
  if (walker_seeds.size() != walkers_.size()) {
    throw DomainError("expected " + std::to_string(walkers_.size()) + " walker seeds, got " +
                      std::to_string(walker_seeds.size()));
  }
  const std::size_t block = static_cast<std::size_t>(std::min<std::uint64_t>(steps_, kBlock));
  std::vector<std::uint8_t> right(block), mask(block);
  std::vector<std::int32_t> dx(block), dy(block);
  const kernels::VisibilityView view = tables_->view();

  std::vector<std::uint64_t> states(walker_seeds.begin(), walker_seeds.end());
  std::vector<std::int64_t> xs(walkers_.size(), 0);
  std::uint64_t visible = 0;
  for (std::uint64_t start = 0; start < steps_; start += block) {
    const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(block, steps_ - start));
    std::fill_n(mask.begin(), len, std::uint8_t{1});
    for (std::size_t j = 0; j < walkers_.size(); ++j) {
      states[j] = kernels_->draw_steps(states[j], walkers_[j].threshold(), right.data(), len);
      std::int64_t x = xs[j];
      for (std::size_t k = 0; k < len; ++k) {
        x += right[k];
        dx[k] = static_cast<std::int32_t>(x);
        dy[k] = static_cast<std::int32_t>(static_cast<std::int64_t>(start + k + 1) - x);
      }
      xs[j] = x;
      kernels_->and_visible(view, dx.data(), dy.data(), mask.data(), len);
    }
    visible += count_set(std::span(mask).first(len));
  }
  return make_result(trial_index, visible, steps_);
}

TrialResult simulate_watchpoint_run(const BExponent& b, const WatchpointSet& watchpoints,
                                    const WalkerConfig& walker, std::uint64_t steps,
                                    std::uint64_t seed) {
  if (!(watchpoints.b() == b)) throw DomainError("watchpoint set was validated for a different b");
  return WatchpointSimulator(watchpoints, walker, steps).run(seed);
}

TrialResult simulate_walkers_run(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps, std::span<const std::uint64_t> walker_seeds) {
  return WalkersSimulator(b, walkers, steps).run(walker_seeds);
}

TrialResult simulate_walkers_run(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps, std::uint64_t master, std::uint64_t trial) {
  std::vector<std::uint64_t> seeds(walkers.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    seeds[j] = derive_trial_seed(master, trial, j, walkers.size());
  }
  auto result = simulate_walkers_run(b, walkers, steps, seeds);
  result.trial_index = trial;
  return result;
}

AggregateResult aggregate_trials(const SimulationSpec& spec, const DensityResult& theory,
                                 const AggregateOptions& options) {
  spec.validate();
  const kernels::KernelSet& k = options.kernels ? *options.kernels : kernels::best_kernels();
  const std::uint64_t r = spec.walkers_per_trial();

  std::function<TrialResult(std::uint64_t)> run_trial;
  std::shared_ptr<WatchpointSimulator> wsim;
  std::shared_ptr<WalkersSimulator> msim;
  if (const auto* w = std::get_if<WatchpointsMode>(&spec.mode)) {
    wsim = std::make_shared<WatchpointSimulator>(w->watchpoints, w->walker, spec.steps, k);
    run_trial = [&](std::uint64_t t) {
      return wsim->run(derive_trial_seed(spec.master_seed, t, 0, 1), t);
    };
  } else {
    msim = std::make_shared<WalkersSimulator>(spec.b, std::get<WalkersMode>(spec.mode).walkers,
                                              spec.steps, k);
    run_trial = [&](std::uint64_t t) {
      std::vector<std::uint64_t> seeds(r);
      for (std::uint64_t j = 0; j < r; ++j) seeds[j] = derive_trial_seed(spec.master_seed, t, j, r);
      return msim->run(seeds, t);
    };
  }

  std::vector<TrialResult> results(spec.trials);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, spec.trials));
  if (threads <= 1) {
    for (std::uint64_t t = 0; t < spec.trials; ++t) results[t] = run_trial(t);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::uint64_t t = next++; t < spec.trials; t = next++) results[t] = run_trial(t);
      });
    }
  }

  AggregateResult out;
  out.trials = spec.trials;
  out.theory = theory;
  KahanSum sum;
  for (const auto& tr : results) sum.add(tr.proportion);
  out.mean_proportion = sum.value() / static_cast<double>(spec.trials);
  if (spec.trials > 1) {
    KahanSum sq;
    for (const auto& tr : results) {
      const double d = tr.proportion - out.mean_proportion;
      sq.add(d * d);
    }
    out.sample_std = std::sqrt(sq.value() / static_cast<double>(spec.trials - 1));
  }
  out.abs_deviation = std::abs(out.mean_proportion - theory.value);
  out.per_trial = std::move(results);
  return out;
}

namespace {

void check_exact_steps(std::uint64_t steps) {
  if (steps == 0) throw DomainError("exact expectation needs at least one step");
  if (steps > kExactStepCap) {
    throw CapacityError("exact expectation is limited to " + std::to_string(kExactStepCap) +
                        " steps, requested " + std::to_string(steps));
  }
}

bool visible_from_all(const BExponent& b, const LatticePoint& p,
                      const std::vector<LatticePoint>& points) {
  for (const auto& w : points) {
    if (p == w || !is_b_visible(b, p, w)) return false;
  }
  return true;
}

}  // namespace

double exact_expectation_watchpoints(const BExponent& b, const WatchpointSet& watchpoints,
                                     const WalkerConfig& walker, std::uint64_t steps) {
  check_exact_steps(steps);
  KahanSum total;
  for (std::uint64_t i = 1; i <= steps; ++i) {
    const std::vector<double> row = binomial_pmf_row(i, walker.alpha());
    KahanSum p_i;
    for (std::uint64_t k = 0; k <= i; ++k) {
      const LatticePoint p{static_cast<std::int64_t>(k), static_cast<std::int64_t>(i - k)};
      if (visible_from_all(b, p, watchpoints.points())) p_i.add(row[k]);
    }
    total.add(p_i.value());
  }
  return total.value() / static_cast<double>(steps);
}

std::vector<double> origin_visibility_probabilities(const BExponent& b, const WalkerConfig& walker,
                                                    std::uint64_t steps) {
  check_exact_steps(steps);
  std::vector<double> out(steps);
  const LatticePoint origin{};
  for (std::uint64_t i = 1; i <= steps; ++i) {
    const std::vector<double> row = binomial_pmf_row(i, walker.alpha());
    KahanSum p_i;
    for (std::uint64_t k = 0; k <= i; ++k) {
      const LatticePoint p{static_cast<std::int64_t>(k), static_cast<std::int64_t>(i - k)};
      if (is_b_visible(b, p, origin)) p_i.add(row[k]);
    }
    out[i - 1] = p_i.value();
  }
  return out;
}

double exact_expectation_walkers(const BExponent& b, const std::vector<WalkerConfig>& walkers,
                                 std::uint64_t steps) {
  check_exact_steps(steps);
  if (walkers.empty()) throw DomainError("walkers mode needs at least one walker");
  const LatticePoint origin{};
  std::vector<std::uint8_t> vis;
  KahanSum total;
  for (std::uint64_t i = 1; i <= steps; ++i) {
    vis.assign(i + 1, 0);
    for (std::uint64_t k = 0; k <= i; ++k) {
      const LatticePoint p{static_cast<std::int64_t>(k), static_cast<std::int64_t>(i - k)};
      vis[k] = is_b_visible(b, p, origin) ? 1 : 0;
    }
    double prod = 1.0;
    for (const auto& w : walkers) {
      const std::vector<double> row = binomial_pmf_row(i, w.alpha());
      KahanSum p_i;
      for (std::uint64_t k = 0; k <= i; ++k) {
        if (vis[k]) p_i.add(row[k]);
      }
      prod *= p_i.value();
    }
    total.add(prod);
  }
  return total.value() / static_cast<double>(steps);
}

}  // namespace bvis

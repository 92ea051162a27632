#include "cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bvis/estimators.hpp"
#include "bvis/theory.hpp"
#include "bvis/visibility.hpp"
#include "verify.hpp"

namespace bvis::cli {

namespace {

using json = nlohmann::ordered_json;

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

std::string cell_csv(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return fmt::format("{}", v); }
    std::string operator()(std::uint64_t v) const { return fmt::format("{}", v); }
    std::string operator()(double v) const { return fmt::format("{:.9g}", v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

std::int64_t parse_int(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ArgumentError(fmt::format("'{}' is not an integer", text));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for (auto part : split(text, ',')) out.push_back(parse_int(part));
  return out;
}

BExponent parse_b(const std::string& text) {
  const auto v = parse_int_list(text);
  if (v.size() != 2) throw ArgumentError(fmt::format("--b expects B1,B2, got '{}'", text));
  if (v[0] <= 0 || v[1] <= 0 || v[0] > 62 || v[1] > 62) {
    throw ArgumentError(fmt::format("--b entries must be positive, got '{}'", text));
  }
  try {
    return BExponent(static_cast<int>(v[0]), static_cast<int>(v[1]));
  } catch (const DomainError& e) {
    throw ArgumentError(fmt::format("--b '{}': {}", text, e.what()));
  }
}

std::vector<LatticePoint> parse_points(const std::string& text) {
  std::vector<LatticePoint> pts;
  for (auto part : split(text, ';')) {
    const auto v = parse_int_list(part);
    if (v.size() != 2) {
      throw ArgumentError(fmt::format("watchpoint '{}' is not of the form x,y", part));
    }
    pts.push_back({v[0], v[1]});
  }
  return pts;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    try {
      std::size_t used = 0;
      const std::string s(part);
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ArgumentError(fmt::format("'{}' is not a number", part));
    }
  }
  return out;
}

WalkerConfig make_walker(double alpha) {
  try {
    return WalkerConfig(alpha);
  } catch (const DomainError& e) {
    throw ArgumentError(e.what());
  }
}

const kernels::KernelSet& pick_kernels(const std::string& name) {
  if (name == "scalar") return kernels::scalar_kernels();
  if (name == "avx2") return kernels::kernels_for(kernels::Backend::Avx2);
  return kernels::best_kernels();
}

void check_budget(std::uint64_t walkers, std::uint64_t steps, std::uint64_t trials,
                  std::uint64_t budget) {
  const long double work = static_cast<long double>(walkers) * steps * trials;
  if (work > static_cast<long double>(budget)) {
    throw BudgetError(fmt::format("walkers*steps*trials = {}*{}*{} exceeds the budget {}", walkers,
                                  steps, trials, budget));
  }
}

json b_json(const BExponent& b) { return json::array({b.b1(), b.b2()}); }

json points_json(const std::vector<LatticePoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(json::array({p.x, p.y}));
  return a;
}

// Options shared by the simulation-style commands.
struct RunOptions {
  std::uint64_t steps = 100000;
  std::uint64_t trials = 10;
  std::string seed = "1";
  unsigned threads = 0;
  std::uint64_t budget = kDefaultBudget;
  std::string kernel = "auto";
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_defaults) {
  auto* steps = cmd->add_option("--steps", o.steps, "steps per walk");
  auto* trials = cmd->add_option("--trials", o.trials, "independent trials");
  auto* seed = cmd->add_option("--seed", o.seed, "master seed, decimal or 0x-hex");
  if (with_defaults) {
    steps->capture_default_str();
    trials->capture_default_str();
    seed->capture_default_str();
  } else {
    steps->required();
    trials->required();
    seed->required();
  }
  cmd->add_option("--threads", o.threads, "worker threads, 0 = available parallelism");
  cmd->add_option("--budget", o.budget, "cap on walkers*steps*trials")->capture_default_str();
  cmd->add_option("--kernel", o.kernel, "inner-loop variant")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();
}

AggregateOptions aggregate_options(const RunOptions& o) {
  return {o.threads, &pick_kernels(o.kernel)};
}

const std::vector<std::string> kSimulateColumns = {
    "row_type", "trial", "visible_count", "proportion", "sample_std", "theoretical", "abs_deviation"};

void simulation_rows(OutputRecord& rec, const AggregateResult& agg) {
  rec.columns = kSimulateColumns;
  std::uint64_t total = 0;
  for (const auto& t : agg.per_trial) {
    rec.rows.push_back({std::string("trial"), t.trial_index, t.visible_count, t.proportion,
                        std::monostate{}, std::monostate{}, std::monostate{}});
    total += t.visible_count;
  }
  rec.rows.push_back({std::string("aggregate"), std::monostate{}, total, agg.mean_proportion,
                      agg.sample_std, agg.theory.value, agg.abs_deviation});
}

void check_rows(OutputRecord& rec, const std::vector<Check>& checks) {
  rec.columns = {"check", "passed", "measured", "tolerance"};
  for (const auto& c : checks) {
    rec.rows.push_back({c.name, std::string(c.passed ? "pass" : "fail"), c.measured, c.tolerance});
  }
}

const std::vector<std::pair<int, int>> kTable1Rows = {{1, 2}, {1, 3}, {1, 4}, {1, 5},
                                                      {2, 3}, {2, 5}, {3, 4}, {3, 5}};
const std::vector<LatticePoint> kTable1Watchpoints = {{0, 0}, {1, 2}, {2, 1}};
const std::vector<std::int64_t> kTable2Rows = {2,  3,  4,  5,   6,   10,  20,  30,
                                               40, 50, 60, 100, 200, 500, 1000};

}  // namespace

std::string to_csv(const OutputRecord& record) {
  std::string s;
  for (std::size_t i = 0; i < record.columns.size(); ++i) {
    if (i) s += ',';
    s += record.columns[i];
  }
  s += '\n';
  for (const auto& row : record.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += cell_csv(row[i]);
    }
    s += '\n';
  }
  return s;
}

json to_json(const OutputRecord& record) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = record.command;
  j["parameters"] = record.parameters;
  json rows = json::array();
  for (const auto& row : record.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size() && i < record.columns.size(); ++i) {
      r[record.columns[i]] = cell_json(row[i]);
    }
    rows.push_back(std::move(r));
  }
  j["results"] = std::move(rows);
  j["seed"] = record.seed ? json(*record.seed) : json(nullptr);
  j["timing_seconds"] = record.seconds;
  return j;
}

std::uint64_t parse_seed(const std::string& text) {
  std::string_view t = text;
  int base = 10;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    t.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, base);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ArgumentError(fmt::format("seed '{}' is not a decimal or 0x-hex integer", text));
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized visibility of lattice random walks: densities, simulation, checks"};
  app.name("bvis");
  app.require_subcommand(1);

  std::string format = "csv";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  // Set by the chosen subcommand; fills the record and returns an exit code.
  std::function<int(OutputRecord&)> action;

  std::string b_text;
  std::string points_text;
  std::string alphas_text;
  double alpha = 0.5;
  std::uint64_t J = 1;
  std::uint64_t r = 1;
  double tol = kDefaultDensityTol;
  RunOptions run_opts;

  // density
  auto* density = app.add_subcommand("density", "limiting densities as truncated Euler products");
  density->require_subcommand(1);
  auto* dw = density->add_subcommand("watchpoints", "one walker seen from J watchpoints");
  dw->add_option("--b", b_text, "exponents B1,B2")->required();
  dw->add_option("--J", J, "number of watchpoints")->required();
  dw->add_option("--tol", tol, "relative accuracy")->capture_default_str();
  add_format(dw);
  dw->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      rec.parameters = {{"b", b_json(b)}, {"J", J}, {"tol", tol}};
      const DensityResult d = density_watchpoints(b, J, tol);
      rec.columns = {"value", "prime_cutoff", "tail_bound"};
      rec.rows.push_back({d.value, d.prime_cutoff, d.tail_bound});
      return kExitOk;
    };
  });
  auto* dr = density->add_subcommand("walkers", "r walkers seen from the origin");
  dr->add_option("--b", b_text, "exponents B1,B2")->required();
  dr->add_option("--r", r, "number of walkers")->required();
  dr->add_option("--tol", tol, "relative accuracy")->capture_default_str();
  add_format(dr);
  dr->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      rec.parameters = {{"b", b_json(b)}, {"r", r}, {"tol", tol}};
      const DensityResult d = density_walkers(b, r, tol);
      rec.columns = {"value", "prime_cutoff", "tail_bound"};
      rec.rows.push_back({d.value, d.prime_cutoff, d.tail_bound});
      return kExitOk;
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo runs");
  simulate->require_subcommand(1);
  auto* sw = simulate->add_subcommand("watchpoints", "proportion of steps visible from W");
  sw->add_option("--b", b_text, "exponents B1,B2")->required();
  sw->add_option("--watchpoints", points_text, "\"x1,y1;x2,y2;...\"")->required();
  sw->add_option("--alpha", alpha, "probability of a right step")->required();
  add_run_options(sw, run_opts, false);
  add_format(sw);
  sw->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      const auto pts = parse_points(points_text);
      const WalkerConfig walker = make_walker(alpha);
      const std::uint64_t seed = parse_seed(run_opts.seed);
      const WatchpointSet w = validate_watchpoint_set(b, pts);
      check_budget(1, run_opts.steps, run_opts.trials, run_opts.budget);
      rec.parameters = {{"b", b_json(b)},          {"watchpoints", points_json(pts)},
                        {"alpha", alpha},          {"steps", run_opts.steps},
                        {"trials", run_opts.trials}, {"kernel", run_opts.kernel}};
      rec.seed = seed;
      const SimulationSpec spec{b, WatchpointsMode{w, walker}, run_opts.steps, run_opts.trials,
                                seed};
      const auto agg = aggregate_trials(spec, density_watchpoints(b, w.size()),
                                        aggregate_options(run_opts));
      simulation_rows(rec, agg);
      return kExitOk;
    };
  });
  auto* sr = simulate->add_subcommand("walkers", "proportion of steps at which all walkers are visible");
  sr->add_option("--b", b_text, "exponents B1,B2")->required();
  sr->add_option("--alphas", alphas_text, "A1,A2,... one per walker")->required();
  add_run_options(sr, run_opts, false);
  add_format(sr);
  sr->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      const auto alphas = parse_doubles(alphas_text);
      std::vector<WalkerConfig> walkers;
      for (double a : alphas) walkers.push_back(make_walker(a));
      const std::uint64_t seed = parse_seed(run_opts.seed);
      check_budget(walkers.size(), run_opts.steps, run_opts.trials, run_opts.budget);
      rec.parameters = {{"b", b_json(b)},           {"alphas", alphas},
                        {"steps", run_opts.steps},  {"trials", run_opts.trials},
                        {"kernel", run_opts.kernel}};
      rec.seed = seed;
      const SimulationSpec spec{b, WalkersMode{walkers}, run_opts.steps, run_opts.trials, seed};
      const auto agg = aggregate_trials(spec, density_walkers(b, walkers.size()),
                                        aggregate_options(run_opts));
      simulation_rows(rec, agg);
      return kExitOk;
    };
  });

  // exact
  std::uint64_t exact_steps = 0;
  auto* exact = app.add_subcommand("exact", "exact expectation of the visible proportion");
  exact->require_subcommand(1);
  auto* ew = exact->add_subcommand("watchpoints", "one walker seen from W");
  ew->add_option("--b", b_text, "exponents B1,B2")->required();
  ew->add_option("--watchpoints", points_text, "\"x1,y1;x2,y2;...\"")->required();
  ew->add_option("--alpha", alpha, "probability of a right step")->required();
  ew->add_option("--steps", exact_steps, "steps, at most 2000")->required();
  add_format(ew);
  ew->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      const auto pts = parse_points(points_text);
      const WalkerConfig walker = make_walker(alpha);
      const WatchpointSet w = validate_watchpoint_set(b, pts);
      rec.parameters = {{"b", b_json(b)}, {"watchpoints", points_json(pts)},
                        {"alpha", alpha}, {"steps", exact_steps}};
      rec.columns = {"expectation"};
      rec.rows.push_back({exact_expectation_watchpoints(b, w, walker, exact_steps)});
      return kExitOk;
    };
  });
  auto* er = exact->add_subcommand("walkers", "r walkers seen from the origin");
  er->add_option("--b", b_text, "exponents B1,B2")->required();
  er->add_option("--alphas", alphas_text, "A1,A2,... one per walker")->required();
  er->add_option("--steps", exact_steps, "steps, at most 2000")->required();
  add_format(er);
  er->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      const auto alphas = parse_doubles(alphas_text);
      std::vector<WalkerConfig> walkers;
      for (double a : alphas) walkers.push_back(make_walker(a));
      rec.parameters = {{"b", b_json(b)}, {"alphas", alphas}, {"steps", exact_steps}};
      rec.columns = {"expectation"};
      rec.rows.push_back({exact_expectation_walkers(b, walkers, exact_steps)});
      return kExitOk;
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "property suites; exit 5 on any violation");
  verify->require_subcommand(1);
  auto finish_checks = [](OutputRecord& rec, const std::vector<Check>& checks) {
    check_rows(rec, checks);
    return all_passed(checks) ? kExitOk : kExitVerification;
  };

  std::uint64_t cases = 10000;
  std::string verify_seed = "1";
  auto* vg = verify->add_subcommand("gcd-properties", "gcd_b identities on random cases");
  vg->add_option("--cases", cases, "random cases per property")->capture_default_str();
  vg->add_option("--seed", verify_seed, "case generator seed")->capture_default_str();
  add_format(vg);
  vg->callback([&] {
    action = [&](OutputRecord& rec) {
      const std::uint64_t seed = parse_seed(verify_seed);
      rec.parameters = {{"cases", cases}};
      rec.seed = seed;
      return finish_checks(rec, verify_gcd_properties(cases, seed));
    };
  });

  int box = 40;
  auto* vv = verify->add_subcommand("visibility-oracle", "fast criterion against the curve definition");
  vv->add_option("--b", b_text, "exponents B1,B2")->required();
  vv->add_option("--box", box, "side of the positive-quadrant box")
      ->check(CLI::Range(1, 2000))
      ->capture_default_str();
  add_format(vv);
  vv->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(b_text);
      rec.parameters = {{"b", b_json(b)}, {"box", box}};
      return finish_checks(rec, verify_visibility_oracle(b, box));
    };
  });

  std::uint64_t cong_n = 0;
  std::uint64_t cong_d = 0;
  double cong_tol = 0.01;
  auto* vc = verify->add_subcommand("congruence-sum", "binomial mass per residue class");
  vc->add_option("--alpha", alpha, "binomial parameter")->required();
  vc->add_option("--n", cong_n, "binomial size")->required();
  vc->add_option("--d", cong_d, "modulus")->required();
  vc->add_option("--tol", cong_tol, "allowed deviation from 1/d")->capture_default_str();
  add_format(vc);
  vc->callback([&] {
    action = [&](OutputRecord& rec) {
      rec.parameters = {{"alpha", alpha}, {"n", cong_n}, {"d", cong_d}, {"tol", cong_tol}};
      return finish_checks(rec, verify_congruence_sum(alpha, cong_n, cong_d, cong_tol));
    };
  });

  std::string kind = "walker-moment";
  std::string shifts_text;
  std::uint64_t mv_J = 0;
  std::uint64_t mv_x = 0;
  double ratio_bound = 10.0;
  auto* vm = verify->add_subcommand("mean-value", "partial sums against their main terms");
  vm->add_option("--kind", kind, "watchpoints-shifted or walker-moment")
      ->check(CLI::IsMember({"watchpoints-shifted", "walker-moment"}))
      ->capture_default_str();
  vm->add_option("--b", b_text, "exponents B1,B2 with B1 <= B2")->required();
  vm->add_option("--r", r, "moment order (walker-moment)");
  vm->add_option("--J", mv_J, "number of shifts (watchpoints-shifted)");
  vm->add_option("--shifts", shifts_text, "S1,S2,... (default 0..J-1)");
  vm->add_option("--x", mv_x, "cutoff, at least 100")->required();
  vm->add_option("--ratio-bound", ratio_bound, "bound on the normalized error")
      ->capture_default_str();
  add_format(vm);
  vm->callback([&] {
    action = [&](OutputRecord& rec) {
      MeanValueParams p;
      p.b = parse_b(b_text);
      rec.parameters = {{"kind", kind}, {"b", b_json(p.b)}, {"x", mv_x}};
      if (kind == "walker-moment") {
        p.kind = MeanValueKind::WalkerMoment;
        p.r = r;
        rec.parameters["r"] = r;
      } else {
        p.kind = MeanValueKind::WatchpointsShifted;
        if (!shifts_text.empty()) {
          p.shifts.values = parse_int_list(shifts_text);
          if (mv_J != 0 && mv_J != p.shifts.size()) {
            throw ArgumentError("--J does not match the number of --shifts");
          }
        } else {
          p.shifts.values.clear();
          for (std::uint64_t j = 0; j < std::max<std::uint64_t>(mv_J, 1); ++j) {
            p.shifts.values.push_back(static_cast<std::int64_t>(j));
          }
        }
        rec.parameters["shifts"] = p.shifts.values;
      }
      return finish_checks(rec, verify_mean_value(p, mv_x, ratio_bound, 10.0));
    };
  });

  // table1 / table2
  auto* t1 = app.add_subcommand("table1", "one walker from {(0,0),(1,2),(2,1)}, alpha 0.5 and 0.3");
  add_run_options(t1, run_opts, true);
  add_format(t1);
  t1->callback([&] {
    action = [&](OutputRecord& rec) {
      const std::uint64_t seed = parse_seed(run_opts.seed);
      check_budget(1, run_opts.steps, 2 * run_opts.trials, run_opts.budget);
      rec.parameters = {{"watchpoints", points_json(kTable1Watchpoints)},
                        {"steps", run_opts.steps},
                        {"trials", run_opts.trials},
                        {"kernel", run_opts.kernel}};
      rec.seed = seed;
      rec.columns = {"b1",         "b2",          "mean_alpha_0.5", "mean_alpha_0.3",
                     "theoretical", "abs_dev_0.5", "abs_dev_0.3"};
      for (const auto& [b1, b2] : kTable1Rows) {
        const BExponent b(b1, b2);
        const WatchpointSet w = validate_watchpoint_set(b, kTable1Watchpoints);
        const DensityResult theory = density_watchpoints(b, w.size());
        double means[2];
        const double alphas[2] = {0.5, 0.3};
        for (int k = 0; k < 2; ++k) {
          const SimulationSpec spec{b, WatchpointsMode{w, WalkerConfig(alphas[k])},
                                    run_opts.steps, run_opts.trials, seed};
          means[k] = aggregate_trials(spec, theory, aggregate_options(run_opts)).mean_proportion;
        }
        rec.rows.push_back({std::int64_t{b1}, std::int64_t{b2}, means[0], means[1], theory.value,
                            std::abs(means[0] - theory.value), std::abs(means[1] - theory.value)});
      }
      return kExitOk;
    };
  });

  std::string table2_b = "2,3";
  std::string rows_text;
  auto* t2 = app.add_subcommand("table2", "r walkers with alpha 0.5 seen from the origin");
  t2->add_option("--b", table2_b, "exponents B1,B2")->capture_default_str();
  t2->add_option("--rows", rows_text, "walker counts r1,r2,... (default: all table rows)");
  add_run_options(t2, run_opts, true);
  add_format(t2);
  t2->callback([&] {
    action = [&](OutputRecord& rec) {
      const BExponent b = parse_b(table2_b);
      const std::uint64_t seed = parse_seed(run_opts.seed);
      const auto rows = rows_text.empty() ? kTable2Rows : parse_int_list(rows_text);
      for (std::int64_t rr : rows) {
        if (rr < 1) throw ArgumentError(fmt::format("--rows entries must be positive, got {}", rr));
        check_budget(static_cast<std::uint64_t>(rr), run_opts.steps, run_opts.trials,
                     run_opts.budget);
      }
      rec.parameters = {{"b", b_json(b)},
                        {"rows", rows},
                        {"alpha", 0.5},
                        {"steps", run_opts.steps},
                        {"trials", run_opts.trials},
                        {"kernel", run_opts.kernel}};
      rec.seed = seed;
      rec.columns = {"b1", "b2", "r", "mean", "theoretical", "abs_dev"};
      for (std::int64_t rr : rows) {
        const auto count = static_cast<std::uint64_t>(rr);
        const DensityResult theory = density_walkers(b, count);
        const SimulationSpec spec{b, WalkersMode{std::vector<WalkerConfig>(count, WalkerConfig(0.5))},
                                  run_opts.steps, run_opts.trials, seed};
        const double mean =
            aggregate_trials(spec, theory, aggregate_options(run_opts)).mean_proportion;
        rec.rows.push_back({std::int64_t{b.b1()}, std::int64_t{b.b2()}, rr, mean, theory.value,
                            std::abs(mean - theory.value)});
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitArgument;
  }

  std::string echo = "bvis";
  for (const auto& a : args) echo += " " + a;

  const auto start = std::chrono::steady_clock::now();
  try {
    OutputRecord rec;
    rec.command = echo;
    const int code = action(rec);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (format == "json") {
      out << to_json(rec).dump(2) << '\n';
    } else {
      out << to_csv(rec);
    }
    err << fmt::format("# {} finished in {:.3f} s\n", echo, rec.seconds);
    if (code == kExitVerification) err << "verification failed\n";
    return code;
  } catch (const InvalidWatchpointSet& e) {
    err << "invalid watchpoint set: " << e.what() << '\n';
    return kExitWatchpoints;
  } catch (const CapacityError& e) {
    err << "capacity exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgument;
  }
}

}  // namespace bvis::cli

#include <sstream>

#include "bvis/estimators.hpp"
#include "bvis/theory.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using bvis::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double field(const std::string& csv, std::size_t row, std::size_t col) {
  return std::stod(fields(lines(csv).at(row)).at(col));
}

}  // namespace

TEST_CASE("density commands") {
  auto r = invoke({"density", "watchpoints", "--b", "1,2", "--J", "3"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "value,prime_cutoff,tail_bound");
  CHECK(std::abs(field(r.out, 1, 0) - 0.534567) <= 5e-7);

  r = invoke({"density", "walkers", "--b", "3,5", "--r", "50"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(field(r.out, 1, 0) - 0.894220) <= 5e-7);

  const auto a = invoke({"density", "walkers", "--b", "2,3", "--r", "1"});
  const auto b = invoke({"density", "watchpoints", "--b", "2,3", "--J", "1"});
  CHECK(field(a.out, 1, 0) == doctest::Approx(field(b.out, 1, 0)).epsilon(1e-9));

  CHECK(invoke({"density", "walkers", "--b", "2,4", "--r", "1"}).code == 2);
  CHECK(invoke({"density", "walkers", "--b", "0,1", "--r", "1"}).code == 2);
  CHECK(invoke({"density", "walkers", "--b", "-1,2", "--r", "1"}).code == 2);
  CHECK(invoke({"density", "walkers", "--b", "1", "--r", "1"}).code == 2);
  CHECK(invoke({"density", "watchpoints", "--b", "1,1", "--J", "9"}).code == 2);
  CHECK(invoke({"density", "watchpoints", "--b", "1,1"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("simulate watchpoints") {
  const std::vector<std::string> args = {"simulate", "watchpoints", "--b", "2,3", "--watchpoints",
                                         "0,0;1,2;2,1", "--alpha", "0.5", "--steps", "100000",
                                         "--trials", "10", "--seed", "1"};
  const auto r = invoke(args);
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 12);
  CHECK(ls[0] == "row_type,trial,visible_count,proportion,sample_std,theoretical,abs_deviation");
  CHECK(fields(ls[1]).at(0) == "trial");
  CHECK(fields(ls[11]).at(0) == "aggregate");
  CHECK(std::abs(field(r.out, 11, 3) - 0.894015) <= 0.01);
  CHECK(field(r.out, 11, 5) == doctest::Approx(0.894015).epsilon(1e-6));

  // Output is independent of the thread count and of the kernel choice.
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3", "--kernel", "scalar"});
  CHECK(invoke(threaded).out == r.out);
  CHECK(invoke(args).out == r.out);

  const auto one = invoke({"simulate", "watchpoints", "--b", "1,1", "--watchpoints", "0,0", "--alpha",
                           "0.5", "--steps", "1", "--trials", "1", "--seed", "0x10"});
  REQUIRE(one.code == 0);
  const double p = field(one.out, 1, 3);
  CHECK((p == 0.0 || p == 1.0));
}

TEST_CASE("simulate errors map to exit codes") {
  auto r = invoke({"simulate", "watchpoints", "--b", "1,2", "--watchpoints", "0,0;4,8", "--alpha", "0.5",
                   "--steps", "10", "--trials", "1", "--seed", "1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("(0,0)") != std::string::npos);
  CHECK(r.err.find("(4,8)") != std::string::npos);

  r = invoke({"simulate", "watchpoints", "--b", "1,1", "--watchpoints", "0,0;1,0;0,1;1,1;3,5", "--alpha",
              "0.5", "--steps", "10", "--trials", "1", "--seed", "1"});
  CHECK(r.code == 3);

  r = invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5,0.5", "--steps", "1000", "--trials",
              "10", "--seed", "1", "--budget", "19999"});
  CHECK(r.code == 4);
  CHECK(r.out.empty());

  CHECK(invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5,1.5", "--steps", "10", "--trials",
                "1", "--seed", "1"})
            .code == 2);
  CHECK(invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5", "--steps", "10", "--trials", "1",
                "--seed", "12abc"})
            .code == 2);
  CHECK(invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5", "--steps", "10", "--trials", "1",
                "--seed", "1", "--kernel", "neon"})
            .code == 2);
  CHECK(invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5", "--steps", "0", "--trials", "1",
                "--seed", "1"})
            .code == 2);
}

TEST_CASE("simulate walkers and json output") {
  const auto r = invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5,0.5", "--steps", "20000",
                         "--trials", "4", "--seed", "7", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["seed"] == 7);
  CHECK(j["results"].size() == 5);
  CHECK(j["results"][4]["row_type"] == "aggregate");
  CHECK(j["results"][0]["sample_std"].is_null());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"schema_version", "command", "parameters", "results", "seed",
                                         "timing_seconds"});

  // CSV and JSON carry the same numbers.
  const auto csv = invoke({"simulate", "walkers", "--b", "2,3", "--alphas", "0.5,0.5", "--steps", "20000",
                           "--trials", "4", "--seed", "7"});
  CHECK(std::stoull(fields(lines(csv.out).at(1)).at(2)) == j["results"][0]["visible_count"]);
}

TEST_CASE("seed parsing") {
  CHECK(bvis::cli::parse_seed("42") == 42);
  CHECK(bvis::cli::parse_seed("0x2A") == 42);
  CHECK(bvis::cli::parse_seed("0XfF") == 255);
  CHECK(bvis::cli::parse_seed("18446744073709551615") == ~0ULL);
  CHECK_THROWS(bvis::cli::parse_seed(""));
  CHECK_THROWS(bvis::cli::parse_seed("0x"));
  CHECK_THROWS(bvis::cli::parse_seed("-1"));
  CHECK_THROWS(bvis::cli::parse_seed("18446744073709551616"));
}

TEST_CASE("exact commands") {
  auto r = invoke({"exact", "watchpoints", "--b", "1,2", "--watchpoints", "0,0", "--alpha", "0.5",
                   "--steps", "4"});
  REQUIRE(r.code == 0);
  CHECK(field(r.out, 1, 0) == doctest::Approx(0.78125).epsilon(1e-12));
  r = invoke({"exact", "watchpoints", "--b", "3,5", "--watchpoints", "0,0", "--alpha", "0.3", "--steps",
              "1"});
  CHECK(field(r.out, 1, 0) == 1.0);
  CHECK(invoke({"exact", "walkers", "--b", "1,2", "--alphas", "0.5", "--steps", "2001"}).code == 4);

  // r equal walkers against the single-walker probabilities raised to r.
  const auto probs =
      bvis::origin_visibility_probabilities(bvis::BExponent(2, 3), bvis::WalkerConfig(0.5), 200);
  bvis::KahanSum cubed;
  for (double p : probs) cubed.add(p * p * p);
  r = invoke({"exact", "walkers", "--b", "2,3", "--alphas", "0.5,0.5,0.5", "--steps", "200"});
  CHECK(field(r.out, 1, 0) == doctest::Approx(cubed.value() / 200).epsilon(1e-8));
}

TEST_CASE("verify commands") {
  auto r = invoke({"verify", "visibility-oracle", "--b", "2,3", "--box", "40"});
  CHECK(r.code == 0);
  CHECK(r.out.find("fail") == std::string::npos);
  r = invoke({"verify", "congruence-sum", "--alpha", "0.3", "--n", "10000", "--d", "7"});
  CHECK(r.code == 0);
  CHECK(field(r.out, 1, 2) < 0.01);
  CHECK(invoke({"verify", "gcd-properties"}).code == 0);
  CHECK(invoke({"verify", "gcd-properties", "--cases", "500", "--seed", "0xBEEF"}).code == 0);
  CHECK(invoke({"verify", "mean-value", "--kind", "walker-moment", "--b", "2,3", "--r", "2", "--x",
                "100000"})
            .code == 0);
  CHECK(invoke({"verify", "mean-value", "--kind", "watchpoints-shifted", "--b", "1,2", "--J", "3", "--x",
                "20000"})
            .code == 0);
  CHECK(invoke({"verify", "mean-value", "--kind", "watchpoints-shifted", "--b", "1,2", "--shifts",
                "0,3,3", "--x", "20000"})
            .code == 0);

  // An impossible tolerance is a verification failure, not an argument error.
  r = invoke({"verify", "congruence-sum", "--alpha", "0.3", "--n", "20", "--d", "7", "--tol", "1e-9"});
  CHECK(r.code == 5);
  CHECK(r.out.find("fail") != std::string::npos);
  CHECK(invoke({"verify", "mean-value", "--kind", "walker-moment", "--b", "2,3", "--r", "2", "--x", "1000",
                "--ratio-bound", "0"})
            .code == 5);
  CHECK(invoke({"verify", "mean-value", "--kind", "walker-moment", "--b", "3,2", "--x", "1000"}).code == 2);
  CHECK(invoke({"verify", "congruence-sum", "--alpha", "0.3", "--n", "5", "--d", "7"}).code == 2);
}

TEST_CASE("table commands") {
  const auto t2 = invoke({"table2", "--b", "3,5", "--rows", "2,10,100", "--steps", "2000", "--trials", "2"});
  REQUIRE(t2.code == 0);
  const auto ls = lines(t2.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "b1,b2,r,mean,theoretical,abs_dev");
  CHECK(std::abs(field(t2.out, 1, 4) - 0.992002) <= 5e-7);
  CHECK(std::abs(field(t2.out, 2, 4) - 0.964525) <= 5e-7);
  CHECK(std::abs(field(t2.out, 3, 4) - 0.868973) <= 1e-6);

  const auto one = invoke({"table2", "--rows", "1", "--steps", "1000", "--trials", "1"});
  REQUIRE(one.code == 0);
  CHECK(field(one.out, 1, 4) ==
        doctest::Approx(bvis::density_watchpoints(bvis::BExponent(2, 3), 1).value).epsilon(1e-8));

  const auto t1 = invoke({"table1", "--steps", "5000", "--trials", "2", "--seed", "42"});
  REQUIRE(t1.code == 0);
  const auto l1 = lines(t1.out);
  REQUIRE(l1.size() == 9);
  CHECK(l1[0] == "b1,b2,mean_alpha_0.5,mean_alpha_0.3,theoretical,abs_dev_0.5,abs_dev_0.3");
  const double expected[] = {0.534567, 0.777373, 0.894015, 0.948994,
                             0.894015, 0.975182, 0.975182, 0.987821};
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(field(t1.out, i + 1, 4) - expected[i]) <= 5e-7);
  CHECK(invoke({"table1", "--steps", "5000", "--trials", "2", "--seed", "42"}).out == t1.out);
  CHECK(invoke({"table1", "--steps", "100000", "--trials", "10", "--budget", "1000"}).code == 4);
  CHECK(invoke({"table2", "--rows", "0"}).code == 2);
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace bvis::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitArgument = 2,
  kExitWatchpoints = 3,
  kExitBudget = 4,
  kExitVerification = 5,
};

inline constexpr int kSchemaVersion = 1;

/// Default cap on walkers * steps * trials for simulate and the tables.
inline constexpr std::uint64_t kDefaultBudget = 20'000'000'000ULL;

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

struct OutputRecord {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::optional<std::uint64_t> seed;
  double seconds = 0.0;
};

/// Header plus one line per row; doubles at 9 significant digits. Timing is
/// not part of the CSV.
std::string to_csv(const OutputRecord& record);
nlohmann::ordered_json to_json(const OutputRecord& record);

/// Decimal or 0x-prefixed hexadecimal.
std::uint64_t parse_seed(const std::string& text);

/// Runs one invocation; `args` excludes the program name. Data goes to
/// `out`, diagnostics and timing to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bvis::cli

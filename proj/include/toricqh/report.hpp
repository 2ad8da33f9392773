#pragma once

// Batch front-end: one command on one polyhedron file, rendered as JSON or
// text.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toricqh/exactmath.hpp"

namespace toricqh {

enum class OutputFormat { Json, Text };

struct RunConfig {
  std::string command;
  std::string input;
  std::string ring = "z";
  std::optional<std::string> cutoff;
  std::size_t margin = 0;
  std::string bfield;   // comma separated, empty for none
  std::string perturb;  // path, empty for none
  OutputFormat format = OutputFormat::Json;
};

struct RunResult {
  int exit_code = 0;
  std::string output;  // report on stdout
  std::string error;   // message on stderr
};

inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitProperty = 4;

const std::vector<std::string>& command_names();

/// Never throws; errors become exit codes.
RunResult run(const RunConfig& config);

/// Report object for a command (throws the library errors).
nlohmann::json build_report(const RunConfig& config);
std::string render_text(const nlohmann::json& report);

std::vector<Rational> parse_csv_rationals(const std::string& csv);

}  // namespace toricqh

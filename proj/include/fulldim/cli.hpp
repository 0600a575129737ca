#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fulldim::cli {

enum ExitCode : int { success = 0, internal_failure = 1, rejected = 2 };

const std::vector<std::string>& commands();

/// Names and defaults of the tolerances that can be overridden.
const std::map<std::string, double>& default_tolerances();

struct RunConfig {
  std::string command;
  std::string input_path;
  /// JSON report destination; standard output when empty.
  std::optional<std::string> output_path;
  /// CSV destination for spectrum and carpet-dim. Falls back to the input's
  /// "csv_output" field, then to output_path with a .csv extension.
  std::optional<std::string> csv_path;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  /// 0 means one worker per hardware thread.
  std::size_t threads = 1;
};

/// Runs one command. The JSON report (or error payload) goes to
/// output_path or `out`; the log goes to `log`.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace fulldim::cli

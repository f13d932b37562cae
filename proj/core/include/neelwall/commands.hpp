#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "neelwall/errors.hpp"
#include "neelwall/io.hpp"

namespace neel {

enum class ExitCode : int {
  success = 0,
  config_error = 2,
  numerical_failure = 3,
  acceptance_failure = 4,
};

/// config_error, io_error (missing inputs) and cfl_violation map to 2; every
/// other library failure to 3.
ExitCode exit_code_for(const Error& error) noexcept;

struct CheckResult {
  std::string id;
  std::string description;
  bool passed = false;
  /// The check could not run (e.g. disabled in the config); never counts as passed.
  bool skipped = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CommandOutcome {
  ExitCode exit_code = ExitCode::success;
  std::vector<std::filesystem::path> files;
  std::vector<CheckResult> checks;
  std::vector<std::string> errors;
};

// Each command validates the full config first and writes into
// cfg.output.directory, updating manifest.json there.
CommandOutcome cmd_solve_profile(const RunConfig& cfg);
CommandOutcome cmd_spectrum(const RunConfig& cfg);
CommandOutcome cmd_evolve(const RunConfig& cfg);
CommandOutcome cmd_report(const RunConfig& cfg);

/// Sets the BLAS thread count when the linked BLAS supports it.
void set_compute_threads(std::size_t threads);

/// One line per check: "PASS id value (threshold) detail".
std::string format_check(const CheckResult& check);

}  // namespace neel

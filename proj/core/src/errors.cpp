#include "neelwall/errors.hpp"

namespace neel {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::grid_mismatch: return "GridMismatch";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::range_violation: return "RangeViolation";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::invariant_violation: return "InvariantViolation";
    case ErrorCode::symmetry_defect: return "SymmetryDefect";
    case ErrorCode::eigen_failure: return "EigenFailure";
    case ErrorCode::gap_violation: return "GapViolation";
    case ErrorCode::orthogonality_violation: return "OrthogonalityViolation";
    case ErrorCode::center_violation: return "CenterViolation";
    case ErrorCode::cfl_violation: return "CflViolation";
    case ErrorCode::blow_up: return "BlowUp";
    case ErrorCode::no_bracket: return "NoBracket";
    case ErrorCode::degenerate_fit: return "DegenerateFit";
    case ErrorCode::solve_failure: return "SolveFailure";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace neel

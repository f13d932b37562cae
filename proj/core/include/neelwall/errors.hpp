#pragma once

#include <stdexcept>
#include <string>

namespace neel {

enum class ErrorCode {
  grid_mismatch,
  invalid_argument,
  range_violation,
  no_convergence,
  invariant_violation,
  symmetry_defect,
  eigen_failure,
  gap_violation,
  orthogonality_violation,
  center_violation,
  cfl_violation,
  blow_up,
  no_bracket,
  degenerate_fit,
  solve_failure,
  config_error,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace neel

#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace neel {

enum class WarningCode {
  far_field_violation,
};

struct Warning {
  WarningCode code;
  std::string message;
};

using WarningHandler = std::function<void(const Warning&)>;

// Process-wide warning channel. Counting is always on; the handler defaults
// to a no-op and is invoked under the channel lock.
void emit_warning(WarningCode code, std::string message);
std::size_t warning_count(WarningCode code);
void reset_warnings();
WarningHandler set_warning_handler(WarningHandler handler);

// Tolerance used by the far-field precondition of the nonlocal operators.
double far_field_tolerance();
void set_far_field_tolerance(double tol);

}  // namespace neel

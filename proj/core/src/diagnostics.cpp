#include "neelwall/diagnostics.hpp"

#include <array>
#include <atomic>
#include <mutex>
#include <utility>

namespace neel {
namespace {

struct Channel {
  std::mutex mutex;
  std::array<std::size_t, 1> counts{};
  WarningHandler handler = [](const Warning&) {};
};

Channel& channel() {
  static Channel c;
  return c;
}

std::atomic<double> g_far_field_tol{1e-6};

}  // namespace

void emit_warning(WarningCode code, std::string message) {
  Channel& c = channel();
  std::lock_guard lock(c.mutex);
  ++c.counts[static_cast<std::size_t>(code)];
  if (c.handler) c.handler(Warning{code, std::move(message)});
}

std::size_t warning_count(WarningCode code) {
  Channel& c = channel();
  std::lock_guard lock(c.mutex);
  return c.counts[static_cast<std::size_t>(code)];
}

void reset_warnings() {
  Channel& c = channel();
  std::lock_guard lock(c.mutex);
  c.counts.fill(0);
}

WarningHandler set_warning_handler(WarningHandler handler) {
  Channel& c = channel();
  std::lock_guard lock(c.mutex);
  std::swap(c.handler, handler);
  return handler;
}

double far_field_tolerance() { return g_far_field_tol.load(); }

void set_far_field_tolerance(double tol) { g_far_field_tol.store(tol); }

}  // namespace neel

#include "neelwall/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "neelwall/errors.hpp"

namespace neel {

bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

Grid::Grid(std::size_t n, double half_width, std::size_t pad_factor)
    : n_(n), half_width_(half_width), spacing_(0.0), pad_factor_(pad_factor) {
  if (!is_power_of_two(n) || n < 4) {
    throw Error(ErrorCode::invalid_argument,
                "grid size must be a power of two >= 4, got " +
                    std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorCode::invalid_argument, "half_width must be positive");
  }
  if (pad_factor < 1) {
    throw Error(ErrorCode::invalid_argument, "pad_factor must be >= 1");
  }
  spacing_ = 2.0 * half_width / static_cast<double>(n);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

double Grid::wavenumber(std::size_t j) const noexcept {
  const auto n = static_cast<long long>(n_);
  auto jj = static_cast<long long>(j);
  if (jj > n / 2) jj -= n;
  return std::numbers::pi * static_cast<double>(jj) / half_width_;
}

double Grid::nyquist() const noexcept {
  return std::numbers::pi / spacing_;
}

GridPtr make_grid(std::size_t n, double half_width, std::size_t pad_factor) {
  return std::make_shared<const Grid>(n, half_width, pad_factor);
}

}  // namespace neel

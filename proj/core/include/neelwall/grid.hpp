#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace neel {

/// Uniform grid on the truncated line [-R, R) with n nodes, x_i = -R + i h.
///
/// The box is treated as one period of the spectral calculus. Fields that do
/// not decay (the wall phase) are handled by the twisted convention described
/// in spectral.hpp. `pad_factor > 1` switches periodic multiplier
/// applications to a zero-padded extension of that many box lengths.
class Grid {
 public:
  Grid(std::size_t n, double half_width, std::size_t pad_factor = 1);

  std::size_t size() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double length() const noexcept { return 2.0 * half_width_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t pad_factor() const noexcept { return pad_factor_; }

  double node(std::size_t i) const noexcept {
    return -half_width_ + static_cast<double>(i) * spacing_;
  }
  std::vector<double> nodes() const;

  /// Index of x = 0.
  std::size_t center_index() const noexcept { return n_ / 2; }
  /// Index of the node at -x_i under the periodic identification -R ~ R.
  std::size_t mirror_index(std::size_t i) const noexcept { return (n_ - i) % n_; }

  /// Wavenumber of FFT bin j (standard ordering), k = pi j / R.
  double wavenumber(std::size_t j) const noexcept;
  double nyquist() const noexcept;

  bool same_as(const Grid& other) const noexcept {
    return n_ == other.n_ && half_width_ == other.half_width_ &&
           pad_factor_ == other.pad_factor_;
  }

 private:
  std::size_t n_;
  double half_width_;
  double spacing_;
  std::size_t pad_factor_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::size_t n, double half_width, std::size_t pad_factor = 1);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace neel

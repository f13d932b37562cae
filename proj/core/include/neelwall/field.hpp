#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "neelwall/grid.hpp"

namespace neel {

/// Real grid function. Value type; binary operations require the same grid.
class Field {
 public:
  Field() = default;
  Field(GridPtr grid, std::vector<double> values);

  static Field zeros(GridPtr grid);
  static Field constant(GridPtr grid, double value);
  static Field sample(GridPtr grid, const std::function<double(double)>& fn);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
  bool all_finite() const noexcept;

  Field map(const std::function<double(double)>& fn) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
Field operator*(Field a, double s);
Field operator*(double s, Field a);
/// Pointwise product.
Field operator*(const Field& a, const Field& b);

Field sin(const Field& f);
Field cos(const Field& f);

}  // namespace neel

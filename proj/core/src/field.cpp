#include "neelwall/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neelwall/errors.hpp"

namespace neel {

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::invalid_argument, "field without grid");
  if (values_.size() != grid_->size()) {
    throw Error(ErrorCode::grid_mismatch,
                "field has " + std::to_string(values_.size()) +
                    " values for a grid of " + std::to_string(grid_->size()));
  }
}

Field Field::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return Field(std::move(grid), std::vector<double>(n, 0.0));
}

Field Field::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return Field(std::move(grid), std::vector<double>(n, value));
}

Field Field::sample(GridPtr grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
  return Field(std::move(grid), std::move(v));
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min() const noexcept {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double Field::max() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Field Field::map(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), fn);
  return Field(grid_, std::move(v));
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid() || !b.grid()) {
    throw Error(ErrorCode::grid_mismatch, "field without grid");
  }
  if (a.grid() != b.grid() && !a.grid()->same_as(*b.grid())) {
    throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
  }
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

Field operator*(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return Field(a.grid(), std::move(v));
}

Field sin(const Field& f) {
  return f.map([](double x) { return std::sin(x); });
}

Field cos(const Field& f) {
  return f.map([](double x) { return std::cos(x); });
}

}  // namespace neel

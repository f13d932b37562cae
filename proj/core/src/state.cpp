#include "neelwall/state.hpp"

#include <cmath>

#include "neelwall/spectral.hpp"

namespace neel {

PairState operator+(const PairState& a, const PairState& b) {
  return {a.first + b.first, a.second + b.second, a.mode};
}

PairState operator-(const PairState& a, const PairState& b) {
  return {a.first - b.first, a.second - b.second, a.mode};
}

PairState operator*(double s, const PairState& a) {
  return {s * a.first, s * a.second, a.mode};
}

double pair_inner_l2(const PairState& a, const PairState& b) {
  return inner_l2(a.first, b.first) + inner_l2(a.second, b.second);
}

double pair_norm_x(const PairState& a) {
  const double h1 = norm_h1(a.first);
  const double l2 = norm_l2(a.second);
  return std::sqrt(h1 * h1 + l2 * l2);
}

}  // namespace neel

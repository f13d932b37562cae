#pragma once

#include "neelwall/field.hpp"

namespace neel {

enum class StateMode { full_phase, perturbation };

/// (first, second) = (phase or perturbation, its time derivative).
struct PairState {
  Field first;
  Field second;
  StateMode mode = StateMode::perturbation;
};

PairState operator+(const PairState& a, const PairState& b);
PairState operator-(const PairState& a, const PairState& b);
PairState operator*(double s, const PairState& a);

/// <U, W> in L2 x L2.
double pair_inner_l2(const PairState& a, const PairState& b);
/// ||first||_{H1}^2 + ||second||_{L2}^2, square-rooted.
double pair_norm_x(const PairState& a);

}  // namespace neel

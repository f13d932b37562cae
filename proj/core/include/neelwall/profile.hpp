#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "neelwall/errors.hpp"
#include "neelwall/field.hpp"

namespace neel {

// Wall phases live on the twisted box: theta(x + 2R) = theta(x) + pi. Such a
// field is stored by its node values; its periodic part is
// p = theta - pi x / (2R), and cos(theta), sin(theta) are antiperiodic.

/// pi x / (2R) on the grid nodes.
Field wall_ramp(const GridPtr& grid);
/// theta - wall_ramp: periodic.
Field wall_periodic_part(const Field& theta);
/// d theta / dx = pi / (2R) + D p.
Field wall_derivative(const Field& theta);
/// d^2 theta / dx^2 = D^2 p.
Field wall_second_derivative(const Field& theta);
/// theta(x + delta) computed spectrally on the periodic part.
Field translate_wall(const Field& theta, double delta);
/// theta_0(x) = arcsin(tanh x).
Field initial_guess(const GridPtr& grid);
/// Odd projection theta(x) <- (theta(x) - theta(-x)) / 2 with theta(-R) = -pi/2.
Field impose_odd(const Field& theta);

/// Throws range_violation if theta leaves [-pi/2 - 0.1, pi/2 + 0.1] after
/// removing the twist at the seam.
void check_wall_range(const Field& theta);

/// E(theta) = 1/2 (||theta'||^2 + ||cos theta||^2_{H^{1/2}-dot} + ||cos theta||^2).
double energy(const Field& theta);
/// E(theta_new) - E(theta_old) evaluated without cancellation.
double energy_difference(const Field& theta_new, const Field& theta_old);
/// L2 gradient -theta'' - sin(theta) (1 + (-Delta)^{1/2}) cos(theta).
Field energy_gradient(const Field& theta);
/// ||energy_gradient(theta)||_{L2}.
double residual(const Field& theta);

struct StepRule {
  double initial_step = 1.0;
  double max_step = 4.0;
  double grow = 1.5;
  double shrink = 0.5;
  double armijo = 1e-4;
  std::size_t max_backtracks = 60;
};

struct SolveConfig {
  GridPtr grid;
  double tol_residual = 1e-8;
  std::size_t max_iters = 20000;
  StepRule step_rule{};
  /// Starting iterate; arcsin(tanh x) when empty.
  std::optional<Field> initial;
};

struct SolveHistory {
  /// Energy after each accepted step, starting with the initial iterate.
  std::vector<double> energy;
  /// Accurate energy increment of each accepted step.
  std::vector<double> increments;
  std::vector<double> residual;
  std::vector<double> step;
};

struct WallProfile {
  Field theta;
  Field dtheta;
  double energy = 0.0;
  double residual_l2 = 0.0;
  double min_slope = 0.0;
  double max_slope = 0.0;
  double max_curvature = 0.0;
  std::size_t iterations = 0;
  SolveHistory history;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, Field last_iterate,
                SolveHistory history);

  const Field& last_iterate() const noexcept { return last_; }
  const SolveHistory& history() const noexcept { return history_; }

 private:
  Field last_;
  SolveHistory history_;
};

void validate(const SolveConfig& cfg);

/// Preconditioned gradient flow with Armijo backtracking on odd iterates.
WallProfile solve_profile(const SolveConfig& cfg);

/// Populates the derived quantities of a profile from its phase and checks
/// the monotonicity and centering invariants.
WallProfile make_profile(Field theta, std::size_t iterations = 0,
                         SolveHistory history = {});

}  // namespace neel

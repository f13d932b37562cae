#include "neelwall/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "neelwall/spectral.hpp"
#include "spectral_detail.hpp"

namespace neel {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGuard = 0.1;

using detail::box_multiplier;
using detail::StdSymbol;

double slope_of_ramp(const Grid& g) { return kPi / g.length(); }

// <f, A f> for the antiperiodic operator 1 + |D|.
double nonlocal_energy(const Field& c) {
  return 0.5 * inner_l2(c, box_multiplier(c, StdSymbol::one_plus_abs,
                                          Twist::antiperiodic));
}

}  // namespace

Field wall_ramp(const GridPtr& grid) {
  const double a = slope_of_ramp(*grid);
  return Field::sample(grid, [a](double x) { return a * x; });
}

Field wall_periodic_part(const Field& theta) {
  return theta - wall_ramp(theta.grid());
}

Field wall_derivative(const Field& theta) {
  Field d = box_multiplier(wall_periodic_part(theta), StdSymbol::d1,
                           Twist::periodic);
  const double a = slope_of_ramp(*theta.grid());
  for (auto& v : d.mutable_values()) v += a;
  return d;
}

Field wall_second_derivative(const Field& theta) {
  return box_multiplier(wall_periodic_part(theta), StdSymbol::d2,
                        Twist::periodic);
}

Field translate_wall(const Field& theta, double delta) {
  const Field p = wall_periodic_part(theta);
  Field shifted = box_multiplier(
      p, [delta](double k) { return std::polar(1.0, k * delta); },
      Twist::periodic);
  const double offset = slope_of_ramp(*theta.grid()) * delta;
  Field ramp = wall_ramp(theta.grid());
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    shifted[i] += ramp[i] + offset;
  }
  return shifted;
}

Field initial_guess(const GridPtr& grid) {
  return Field::sample(grid, [](double x) { return std::asin(std::tanh(x)); });
}

Field impose_odd(const Field& theta) {
  const Grid& g = *theta.grid();
  const std::size_t n = g.size();
  Field out = theta;
  out[0] = -kPi / 2.0;
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = 0.5 * (theta[i] - theta[n - i]);
  }
  out[g.center_index()] = 0.0;
  return out;
}

void check_wall_range(const Field& theta) {
  const double lo = -kPi / 2.0 - kGuard;
  const double hi = kPi / 2.0 + kGuard;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double v = theta[i];
    if (!(v >= lo && v <= hi)) {
      throw Error(ErrorCode::range_violation,
                  "phase value " + std::to_string(v) + " at node " +
                      std::to_string(i) + " outside the guard band");
    }
  }
}

double energy(const Field& theta) {
  check_wall_range(theta);
  const Grid& g = *theta.grid();
  const Field p = wall_periodic_part(theta);
  const double exchange =
      kPi * kPi / (4.0 * g.half_width()) +
      0.5 * inner_l2(p, -box_multiplier(p, StdSymbol::d2, Twist::periodic));
  return exchange + nonlocal_energy(cos(theta));
}

double energy_difference(const Field& theta_new, const Field& theta_old) {
  check_wall_range(theta_new);
  check_wall_range(theta_old);
  require_same_grid(theta_new, theta_old);
  const Field dp = theta_new - theta_old;
  const Field sp = wall_periodic_part(theta_new) + wall_periodic_part(theta_old);
  const double exchange =
      0.5 * inner_l2(dp, -box_multiplier(sp, StdSymbol::d2, Twist::periodic));
  // cos a - cos b = -2 sin((a + b) / 2) sin((a - b) / 2)
  const std::size_t n = theta_new.size();
  std::vector<double> dc(n);
  for (std::size_t i = 0; i < n; ++i) {
    dc[i] = -2.0 * std::sin(0.5 * (theta_new[i] + theta_old[i])) *
            std::sin(0.5 * (theta_new[i] - theta_old[i]));
  }
  const Field dcf(theta_new.grid(), std::move(dc));
  const Field sc = cos(theta_new) + cos(theta_old);
  const double nonlocal =
      0.5 * inner_l2(dcf, box_multiplier(sc, StdSymbol::one_plus_abs,
                                         Twist::antiperiodic));
  return exchange + nonlocal;
}

Field energy_gradient(const Field& theta) {
  check_wall_range(theta);
  const Field p = wall_periodic_part(theta);
  Field grad = -box_multiplier(p, StdSymbol::d2, Twist::periodic);
  const Field bc =
      box_multiplier(cos(theta), StdSymbol::one_plus_abs, Twist::antiperiodic);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] -= std::sin(theta[i]) * bc[i];
  }
  return grad;
}

double residual(const Field& theta) { return norm_l2(energy_gradient(theta)); }

NoConvergence::NoConvergence(const std::string& message, Field last_iterate,
                             SolveHistory history)
    : Error(ErrorCode::no_convergence, message),
      last_(std::move(last_iterate)),
      history_(std::move(history)) {}

void validate(const SolveConfig& cfg) {
  if (!cfg.grid) throw Error(ErrorCode::config_error, "solver grid missing");
  if (!(cfg.tol_residual > 0.0)) {
    throw Error(ErrorCode::config_error, "tol_residual must be positive");
  }
  if (cfg.max_iters == 0) {
    throw Error(ErrorCode::config_error, "max_iters must be positive");
  }
  const StepRule& r = cfg.step_rule;
  if (!(r.initial_step > 0.0) || !(r.max_step >= r.initial_step) ||
      !(r.grow >= 1.0) || !(r.shrink > 0.0 && r.shrink < 1.0) ||
      !(r.armijo > 0.0 && r.armijo < 1.0) || r.max_backtracks == 0) {
    throw Error(ErrorCode::config_error, "invalid step rule");
  }
  if (cfg.initial && !cfg.initial->grid()->same_as(*cfg.grid)) {
    throw Error(ErrorCode::grid_mismatch, "initial iterate on another grid");
  }
}

WallProfile solve_profile(const SolveConfig& cfg) {
  validate(cfg);
  Field theta = impose_odd(cfg.initial ? *cfg.initial : initial_guess(cfg.grid));
  check_wall_range(theta);

  SolveHistory history;
  double e = energy(theta);
  Field grad = energy_gradient(theta);
  double res = norm_l2(grad);
  history.energy.push_back(e);
  history.residual.push_back(res);

  const StepRule& rule = cfg.step_rule;
  double step = rule.initial_step;
  std::size_t iter = 0;
  while (res > cfg.tol_residual) {
    if (iter >= cfg.max_iters) {
      throw NoConvergence("residual " + std::to_string(res) + " after " +
                              std::to_string(iter) + " iterations",
                          theta, history);
    }
    const Field dir = -bessel_inverse(grad);
    const double slope = inner_l2(grad, dir);
    if (!(slope < 0.0)) {
      throw NoConvergence("preconditioned direction is not a descent direction",
                          theta, history);
    }
    bool accepted = false;
    for (std::size_t bt = 0; bt < rule.max_backtracks; ++bt) {
      Field trial = impose_odd(theta + step * dir);
      const double lo = -kPi / 2.0 - kGuard;
      const double hi = kPi / 2.0 + kGuard;
      if (trial.min() >= lo && trial.max() <= hi) {
        const double de = energy_difference(trial, theta);
        if (de <= rule.armijo * step * slope) {
          theta = std::move(trial);
          e += de;
          history.increments.push_back(de);
          history.step.push_back(step);
          accepted = true;
          break;
        }
      }
      step *= rule.shrink;
    }
    if (!accepted) {
      throw NoConvergence("line search failed at residual " + std::to_string(res),
                          theta, history);
    }
    ++iter;
    grad = energy_gradient(theta);
    res = norm_l2(grad);
    history.energy.push_back(e);
    history.residual.push_back(res);
    step = std::min(step * rule.grow, rule.max_step);
  }
  return make_profile(std::move(theta), iter, std::move(history));
}

WallProfile make_profile(Field theta, std::size_t iterations,
                         SolveHistory history) {
  check_wall_range(theta);
  const Grid& g = *theta.grid();
  if (theta[g.center_index()] != 0.0) {
    throw Error(ErrorCode::invariant_violation, "wall is not centered at 0");
  }
  WallProfile p;
  p.dtheta = wall_derivative(theta);
  p.energy = energy(theta);
  p.residual_l2 = residual(theta);
  p.min_slope = p.dtheta.min();
  p.max_slope = p.dtheta.max();
  p.max_curvature = wall_second_derivative(theta).max_abs();
  p.iterations = iterations;
  p.history = std::move(history);
  p.theta = std::move(theta);
  if (!(p.min_slope > 0.0)) {
    throw Error(ErrorCode::invariant_violation,
                "wall is not monotone: min slope " + std::to_string(p.min_slope));
  }
  return p;
}

}  // namespace neel

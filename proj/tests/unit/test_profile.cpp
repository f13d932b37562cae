#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "neelwall/profile.hpp"
#include "neelwall/spectral.hpp"
#include "oracles.hpp"

using namespace neel;

TEST(Profile, InitialGuessEnergyApproachesLineValue) {
  // The box couples the wall to its periodic images through the nonlocal
  // term, so the box energy converges to the line value as R grows.
  const double line = oracle::line_energy_arcsin_tanh();
  const double e30 = energy(initial_guess(make_grid(1024, 30.0)));
  const double e60 = energy(initial_guess(make_grid(2048, 60.0)));
  const double e120 = energy(initial_guess(make_grid(4096, 120.0)));
  EXPECT_LT(std::abs(e60 - line), std::abs(e30 - line));
  EXPECT_LT(std::abs(e120 - line), std::abs(e60 - line));
  EXPECT_LT(std::abs(e120 - line), 1e-4);
}

TEST(Profile, GradientMatchesFiniteDifferences) {
  auto g = make_grid(256, 15.0);
  Field theta = initial_guess(g);
  const Field grad = energy_gradient(theta);
  for (double c : {0.0, 1.5, -4.0}) {
    Field v = Field::sample(g, [c](double x) { return std::exp(-(x - c) * (x - c)) * (x - c + 0.5); });
    const double fd = oracle::central_difference(
        [&](double eps) { return energy(theta + eps * v); }, 1e-4);
    EXPECT_NEAR(inner_l2(grad, v), fd, 1e-8);
  }
}

TEST(Profile, EnergyDifferenceAvoidsCancellation) {
  auto g = make_grid(256, 15.0);
  Field a = initial_guess(g);
  Field v = Field::sample(g, [](double x) { return std::exp(-x * x); });
  Field b = a + 1e-9 * v;
  const double fd = energy(b) - energy(a);
  const double acc = energy_difference(b, a);
  EXPECT_NEAR(acc, 1e-9 * inner_l2(energy_gradient(a), v), 1e-15);
  EXPECT_NEAR(acc, fd, 1e-13);
}

TEST(Profile, ImposeOddProducesOddPhase) {
  auto g = make_grid(128, 10.0);
  Field theta = initial_guess(g) + 0.01 * Field::sample(g, [](double x) { return std::exp(-x * x); });
  Field odd = impose_odd(theta);
  EXPECT_EQ(odd[g->center_index()], 0.0);
  EXPECT_DOUBLE_EQ(odd[0], -std::numbers::pi / 2.0);
  for (std::size_t i = 1; i < g->size(); ++i) EXPECT_DOUBLE_EQ(odd[i], -odd[g->mirror_index(i)]);
}

TEST(Profile, SolvedWallCertificate) {
  const WallProfile& p = fixtures::small_wall();
  EXPECT_LE(p.residual_l2, 1e-8);
  EXPECT_EQ(p.theta[p.theta.grid()->center_index()], 0.0);
  EXPECT_GT(p.min_slope, 0.0);
  for (double d : p.history.increments) EXPECT_LE(d, 0.0);
  EXPECT_LT(p.energy, p.history.energy.front());
  EXPECT_TRUE(std::isfinite(p.max_curvature));
}

TEST(Profile, WallStaysWithinRange) {
  const WallProfile& p = fixtures::small_wall();
  EXPECT_NO_THROW(check_wall_range(p.theta));
  EXPECT_GT(p.theta.min(), -std::numbers::pi / 2.0 - 1e-12);
  EXPECT_LT(p.theta.max(), std::numbers::pi / 2.0);
}

TEST(Profile, EnergyIsTranslationInvariant) {
  const WallProfile& p = fixtures::small_wall();
  for (double d : {0.3, -1.1, 2.0}) {
    EXPECT_NEAR(energy(translate_wall(p.theta, d)), p.energy, 1e-12);
  }
}

TEST(Profile, NoConvergenceCarriesHistory) {
  SolveConfig cfg;
  cfg.grid = make_grid(256, 15.0);
  cfg.max_iters = 2;
  try {
    solve_profile(cfg);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_convergence);
    EXPECT_GE(e.history().energy.size(), 2u);
    EXPECT_EQ(e.last_iterate().size(), 256u);
  }
}

TEST(Profile, RejectsInvalidConfig) {
  SolveConfig cfg;
  EXPECT_THROW(solve_profile(cfg), Error);
  cfg.grid = make_grid(64, 8.0);
  cfg.tol_residual = 0.0;
  EXPECT_THROW(solve_profile(cfg), Error);
}

TEST(Profile, MakeProfileRejectsOffCenterWall) {
  auto g = make_grid(128, 10.0);
  Field shifted = translate_wall(initial_guess(g), 0.5);
  EXPECT_THROW(make_profile(shifted), Error);
}

TEST(Profile, EnergyConvergesUnderRefinement) {
  const double e_small = fixtures::small_wall().energy;
  const double e_medium = fixtures::medium_wall().energy;
  EXPECT_LT(std::abs(e_small - e_medium) / e_medium, 1e-3);
}

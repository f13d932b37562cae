#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "neelwall/dynamics.hpp"
#include "neelwall/spectral.hpp"
#include "oracles.hpp"

using namespace neel;

namespace {

PairState oscillator(const GridPtr& g) {
  return {Field::sample(g, [](double x) { return std::exp(-x * x); }), Field::zeros(g), StateMode::perturbation};
}

double rk4_error(double dt) {
  auto g = make_grid(16, 2.0);
  const PairState s0 = oscillator(g);
  const Rhs rhs = [](const PairState& s) { return PairState{s.second, -1.0 * s.first, s.mode}; };
  PairState s = s0;
  const int steps = static_cast<int>(std::round(1.0 / dt));
  for (int i = 0; i < steps; ++i) s = step_rk4(s, dt, rhs, 1.0);
  return (s.first - std::cos(1.0) * s0.first).max_abs();
}

std::vector<TraceRecord> synthetic_trace(double a, double w, double ripple) {
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(0.2 * i);
  const auto y = oracle::synthetic_decay(t, a, w, ripple);
  std::vector<TraceRecord> trace;
  for (std::size_t i = 0; i < t.size(); ++i) {
    TraceRecord r;
    r.t = t[i];
    r.h1_distance = y[i];
    trace.push_back(r);
  }
  return trace;
}

}  // namespace

TEST(Dynamics, Rk4IsFourthOrder) {
  const double e1 = rk4_error(0.1);
  const double e2 = rk4_error(0.05);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}

TEST(Dynamics, StepRejectsCflViolation) {
  auto g = make_grid(16, 2.0);
  const Rhs rhs = [](const PairState& s) { return s; };
  EXPECT_THROW(step_rk4(oscillator(g), 0.5, rhs, 0.1), Error);
}

TEST(Dynamics, ValidateRejectsLargeStep) {
  auto g = make_grid(2048, 60.0);
  EvolveConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 1.0;
  EXPECT_GT(cfg.dt, cfl_limit(*g));
  try {
    validate(cfg, *g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cfl_violation);
  }
  cfg.dt = 0.02;
  EXPECT_NO_THROW(validate(cfg, *g));
}

TEST(Dynamics, DecayFitRecoversRate) {
  const DecayFit f = decay_fit(synthetic_trace(0.05, 0.37, 0.0));
  EXPECT_NEAR(f.omega, 0.37, 1e-12);
  EXPECT_NEAR(f.amplitude, 0.05, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  const DecayFit noisy = decay_fit(synthetic_trace(0.05, 0.37, 0.05));
  EXPECT_NEAR(noisy.omega, 0.37, 0.01);
  EXPECT_LT(noisy.r_squared, 1.0);
  EXPECT_THROW(decay_fit(synthetic_trace(1.0, 0.1, 0.0), 100.0, 200.0), Error);
}

TEST(Dynamics, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({1, 10, 100}, {2, 200, 20000}), 2.0, 1e-12);
}

TEST(Dynamics, ExtractShiftFindsTranslation) {
  const WallProfile& p = fixtures::small_wall();
  for (double d : {0.0, 0.7, -2.3}) {
    const ShiftEstimate s = extract_shift(translate_wall(p.theta, d), p);
    EXPECT_NEAR(s.delta, d, 1e-7);
    EXPECT_LT(s.distance, 1e-8);
  }
}

TEST(Dynamics, TranslateOnlyInitialDataStaysPut) {
  const WallProfile& p = fixtures::small_wall();
  EvolveConfig cfg;
  cfg.T = 2.0;
  const PairState s0{translate_wall(p.theta, 0.4), Field::zeros(p.theta.grid()), StateMode::full_phase};
  const EvolveResult r = evolve(s0, p, cfg);
  for (const auto& rec : r.trace) {
    EXPECT_NEAR(rec.shift, 0.4, 1e-7);
    EXPECT_LT(rec.h1_distance, 1e-7);
  }
}

TEST(Dynamics, EnergyIdentityHolds) {
  const WallProfile& p = fixtures::small_wall();
  EvolveConfig cfg;
  cfg.T = 4.0;
  const Field bump = perturbation_shape(PerturbationShape::even_bump, p);
  const PairState s0{p.theta + 0.05 * bump, Field::zeros(p.theta.grid()), StateMode::full_phase};
  const EvolveResult r = evolve(s0, p, cfg);
  const double e0 = r.trace.front().kinetic + r.trace.front().potential;
  for (const auto& rec : r.trace) {
    EXPECT_NEAR(rec.kinetic + rec.potential + rec.dissipation_integral, e0, 1e-8);
  }
  EXPECT_LT(r.trace.back().h1_distance, r.trace.front().h1_distance);
}

TEST(Dynamics, ProjectedLinearRunDecaysAtPredictedRate) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  const SpectrumReport rep = eig_dense(assemble(OperatorKind::L, c));
  EvolveConfig cfg;
  cfg.T = 30.0;
  const ProjectorData pd = build_projector(p, cfg.nu);
  const Field bump = perturbation_shape(PerturbationShape::even_bump, p);
  const PairState u0 = project({0.05 * bump, Field::zeros(p.theta.grid()), StateMode::perturbation}, pd);
  const EvolveResult r = evolve(u0, p, cfg);
  const DecayFit f = decay_fit(r.trace);
  const double prediction = linear_decay_prediction(rep, cfg.nu);
  EXPECT_NEAR(f.omega / prediction, 1.0, 0.2);
  EXPECT_GE(f.r_squared, 0.99);
}

TEST(Dynamics, TranslateFamilyIsSecondOrder) {
  const H2Report r = hypothesis_H2_check(fixtures::small_wall(), {1e-3, 1e-2, 0.1});
  EXPECT_LE(r.max_ratio, 1.1 * r.constant);
  EXPECT_LT(r.variation, 0.1);
}

TEST(Dynamics, PerturbationShapes) {
  const WallProfile& p = fixtures::small_wall();
  for (auto shape : {PerturbationShape::even_bump, PerturbationShape::odd_bump, PerturbationShape::random}) {
    EXPECT_NEAR(norm_h1(perturbation_shape(shape, p, 4)), 1.0, 1e-12) << to_string(shape);
    EXPECT_EQ(parse_shape(to_string(shape)), shape);
  }
  EXPECT_THROW(parse_shape("square"), Error);
  const Field a = random_compact_field(p.theta.grid(), 11);
  const Field b = random_compact_field(p.theta.grid(), 11);
  EXPECT_EQ((a - b).max_abs(), 0.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "neelwall/dynamics.hpp"
#include "neelwall/operators.hpp"
#include "neelwall/spectral.hpp"
#include "oracles.hpp"

using namespace neel;

namespace {

Field orthogonal(const Field& u, const Field& d) { return u - (inner_l2(u, d) / inner_l2(d, d)) * d; }

}  // namespace

TEST(Operators, LinearizationMatchesDirectSums) {
  auto g = make_grid(64, 6.0);
  SolveConfig cfg;
  cfg.grid = g;
  cfg.tol_residual = 1e-6;
  const WallProfile p = solve_profile(cfg);
  const CoefficientSet c = build_coefficients(p);
  Field u = Field::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + x); });
  const auto uv = fixtures::to_vector(u);
  const double r = g->half_width();
  auto one_plus_abs = [](double k) { return std::complex<double>(1.0 + std::abs(k), 0.0); };

  std::vector<double> su(uv.size());
  for (std::size_t i = 0; i < su.size(); ++i) su[i] = uv[i] * std::sin(p.theta[i]);
  auto bsu = oracle::apply_multiplier(su, r, true, one_plus_abs);
  std::vector<double> cos_t(uv.size());
  for (std::size_t i = 0; i < cos_t.size(); ++i) cos_t[i] = std::cos(p.theta[i]);
  auto bcos = oracle::apply_multiplier(cos_t, r, true, one_plus_abs);
  auto d2u = oracle::apply_multiplier(uv, r, false, [](double k) { return std::complex<double>(-k * k, 0.0); });

  const Field lu = apply_L(u, c);
  const Field s = apply_S(u, c);
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const double s_ref = std::sin(p.theta[i]) * bsu[i];
    const double c_ref = cos_t[i] * bcos[i];
    EXPECT_NEAR(s[i], s_ref, 1e-12);
    EXPECT_NEAR(c.c_theta[i], c_ref, 1e-12);
    EXPECT_NEAR(lu[i], -d2u[i] + s_ref - c_ref * uv[i], 1e-11);
  }
}

TEST(Operators, LIsTheEnergyHessian) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  const GridPtr& g = p.theta.grid();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Field u = random_compact_field(g, seed);
    const double second = oracle::second_difference([&](double e) { return energy(p.theta + e * u); }, 1e-3);
    EXPECT_NEAR(inner_l2(apply_L(u, c), u), second, 1e-5 * std::abs(second) + 1e-6);
  }
}

TEST(Operators, TranslationModeIsInKernel) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  EXPECT_LE(norm_l2(apply_L(p.dtheta, c)), 1e-6 * norm_l2(p.dtheta));
}

TEST(Operators, AsymptoticOperatorSpectrumIsItsSymbol) {
  auto g = make_grid(64, 6.0);
  const DenseSymmetricOperator op = assemble(OperatorKind::L_infinity, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  const auto ref = oracle::asymptotic_symbol_spectrum(64, 6.0);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(es.eigenvalues()(i), ref[i], 1e-9 * ref.back());
}

TEST(Operators, AssembledMatrixMatchesApply) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  const DenseSymmetricOperator op = assemble(OperatorKind::L, c);
  EXPECT_LE(op.raw_symmetry_defect, 1e-10);
  Field u = random_compact_field(p.theta.grid(), 9);
  EXPECT_LT((apply_dense(op, u) - apply_L(u, c)).max_abs(), 1e-9);
}

TEST(Operators, SFormIdentity) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  for (std::uint64_t k = 0; k < 20; ++k) {
    Field u = random_compact_field(p.theta.grid(), 40 + 2 * k);
    Field v = random_compact_field(p.theta.grid(), 41 + 2 * k);
    const double lhs = inner_l2(apply_S(u, c), v);
    const double rhs = b_form(c.s_theta * u, c.s_theta * v, Twist::antiperiodic);
    EXPECT_NEAR(lhs, rhs, 1e-9 * (std::abs(lhs) + 1.0));
  }
}

TEST(Operators, AFormRequiresOrthogonality) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  Field u = random_compact_field(p.theta.grid(), 5);
  EXPECT_THROW(a_form(u, u, c), Error);
  Field w = orthogonal(u, p.dtheta);
  EXPECT_NEAR(a_form(w, w, c), inner_l2(apply_L(w, c), w), 1e-9);
}

TEST(Operators, HessianBoundOnCenteredVariations) {
  const WallProfile& p = fixtures::small_wall();
  const CoefficientSet c = build_coefficients(p);
  const GridPtr& g = p.theta.grid();
  for (std::uint64_t k = 0; k < 20; ++k) {
    Field u = random_compact_field(g, 70 + k);
    u[g->center_index()] = 0.0;
    const HessianCheck h = hessian_check(u, c);
    EXPECT_GE(h.lhs - h.rhs, -1e-8 * std::pow(norm_h1(u), 2));
  }
  Field u = random_compact_field(g, 3);
  u[g->center_index()] = 1.0;
  EXPECT_THROW(hessian_check(u, c), Error);
}

TEST(Operators, NonlinearRemainderIsQuadratic) {
  const WallProfile& p = fixtures::small_wall();
  Field u = random_compact_field(p.theta.grid(), 12);
  u *= 1.0 / norm_h1(u);
  const double a = norm_l2(nonlinear_remainder(1e-2 * u, p, 0.0));
  const double b = norm_l2(nonlinear_remainder(1e-3 * u, p, 0.0));
  EXPECT_NEAR(std::log10(a / b), 2.0, 0.05);
}

TEST(Operators, MatrixDumpRoundTrip) {
  auto g = make_grid(32, 4.0);
  const DenseSymmetricOperator op = assemble(OperatorKind::L_infinity, g);
  const auto path = std::filesystem::temp_directory_path() / "neelwall_dump_test.bin";
  write_matrix_dump(op, path);
  const DenseSymmetricOperator back = read_matrix_dump(path);
  EXPECT_EQ(back.kind, OperatorKind::L_infinity);
  EXPECT_EQ(back.grid->size(), 32u);
  EXPECT_EQ((back.matrix - op.matrix).cwiseAbs().maxCoeff(), 0.0);
  std::filesystem::remove(path);
}

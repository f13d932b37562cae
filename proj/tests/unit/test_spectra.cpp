#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fixtures.hpp"
#include "neelwall/dynamics.hpp"
#include "neelwall/linalg.hpp"
#include "neelwall/spectra.hpp"
#include "neelwall/spectral.hpp"

using namespace neel;
using cplx = std::complex<double>;

namespace {

struct SmallSpectrum {
  CoefficientSet coeffs;
  DenseSymmetricOperator op;
  SpectrumReport report;
};

const SmallSpectrum& small_spectrum() {
  static const SmallSpectrum s = [] {
    SmallSpectrum out;
    out.coeffs = build_coefficients(fixtures::small_wall());
    out.op = assemble(OperatorKind::L, out.coeffs);
    SpectrumOptions o;
    o.want_vectors = true;
    out.report = eig_dense(out.op, o);
    return out;
  }();
  return s;
}

/// Distance from z to the polyline through consecutive samples of one branch.
double polyline_distance(cplx z, const std::vector<cplx>& pts) {
  double best = std::abs(z - pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx a = pts[i - 1], b = pts[i];
    const cplx d = b - a;
    const double n2 = std::norm(d);
    const double t = n2 > 0.0 ? std::clamp(((z - a) * std::conj(d)).real() / n2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::abs(z - (a + t * d)));
  }
  return best;
}

}  // namespace

TEST(Linalg, SymmetricEigenOnKnownMatrix) {
  Eigen::MatrixXd m(3, 3);
  m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const auto e = linalg::symmetric_eigen(m, true);
  EXPECT_NEAR(e.values(0), 2.0 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e.values(1), 2.0, 1e-14);
  EXPECT_NEAR(e.values(2), 2.0 + std::sqrt(2.0), 1e-14);
  EXPECT_LT((m * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-13);
}

TEST(Linalg, VectorsCorrectAtScale) {
  // Large enough to reach the blocked kernels of the BLAS.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(400, 400);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  const Eigen::MatrixXd m = a + a.transpose();
  const auto e = linalg::symmetric_eigen(m, true);
  EXPECT_LT((m * e.vectors - e.vectors * e.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, GeneralEigenvaluesOfRotation) {
  Eigen::MatrixXd m(2, 2);
  m << 0, -2, 2, 0;
  auto ev = linalg::general_eigenvalues(m);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(linalg::hausdorff(ev, {cplx(0, 2), cplx(0, -2)}), 0.0, 1e-14);
}

TEST(Linalg, MatchingDistance) {
  std::vector<cplx> a{{0, 0}, {1, 0}, {1, 0}};
  std::vector<cplx> b{{1, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(linalg::hausdorff(a, b), 0.0);
  EXPECT_NEAR(linalg::matching_distance(a, b), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(linalg::matching_distance(a, {cplx(0, 0)})));
}

TEST(Spectra, QuadraticRootsSatisfyVieta) {
  for (double nu : {0.5, 1.0, 2.0, 3.0, 7.0}) {
    for (double mu : {0.0, 1e-12, 0.3, 1.0, 1.02, 2.25, 50.0}) {
      const auto [r1, r2] = quadratic_roots(mu, nu);
      EXPECT_NEAR(std::abs(r1 + r2 + nu), 0.0, 1e-14 * (1.0 + nu));
      EXPECT_NEAR(std::abs(r1 * r2 - mu), 0.0, 1e-13 * (1.0 + mu));
      EXPECT_GE(r1.real(), r2.real());
    }
  }
  const auto [z1, z2] = quadratic_roots(0.0, 1.5);
  EXPECT_EQ(z1, cplx(0.0, 0.0));
  EXPECT_EQ(z2, cplx(-1.5, 0.0));
}

TEST(Spectra, DecayBounds) {
  EXPECT_DOUBLE_EQ(zeta0_formula(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(zeta0_formula(2.0, 1.0), 1.0);
  EXPECT_NEAR(zeta0_formula(3.0, 1.0), 1.5 - std::sqrt(5.0) / 2.0, 1e-15);
  EXPECT_NEAR(zeta0_formula(3.0, 0.5), 1.5 - std::sqrt(7.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(essential_spectrum_bound(1.0), -0.5);
  EXPECT_DOUBLE_EQ(point_spectrum_bound(0.5, 1.0), -0.25);
}

TEST(Spectra, EssentialCurveCases) {
  const auto xi = xi_grid(50.0, 501);
  EXPECT_EQ(xi.size(), 501u);
  EXPECT_EQ(xi.front(), -50.0);
  for (const auto& z : essential_curve(1.0, xi)) EXPECT_EQ(z.real(), -0.5);
  const auto touch = essential_curve(2.0, {0.0});
  EXPECT_EQ(touch[0], cplx(-1.0, 0.0));
  EXPECT_EQ(touch[1], cplx(-1.0, 0.0));
  for (double nu : {0.5, 2.0, 3.0}) {
    const double bound = essential_spectrum_bound(nu);
    for (const auto& z : essential_curve(nu, xi)) EXPECT_LE(z.real(), bound + 1e-15);
  }
}

TEST(Spectra, DiscreteAsymptoticCompanionLiesOnCurve) {
  auto g = make_grid(128, 10.0);
  const DenseSymmetricOperator op = assemble(OperatorKind::L_infinity, g);
  const double nu = 1.0;
  const auto ev = companion_eigenvalues(op.matrix, nu);
  const double kmax = g->nyquist();
  const auto xi = xi_grid(kmax, 20001);
  std::vector<cplx> upper, lower;
  const auto curve = essential_curve(nu, xi);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    upper.push_back(curve[2 * i]);
    lower.push_back(curve[2 * i + 1]);
  }
  for (const auto& z : ev) {
    EXPECT_LT(std::min(polyline_distance(z, upper), polyline_distance(z, lower)), 1e-3);
  }
}

TEST(Spectra, TranslationModeAndGap) {
  const auto& s = small_spectrum();
  const WallProfile& p = fixtures::small_wall();
  EXPECT_EQ(s.report.zero_mode_count, 1u);
  EXPECT_GE(zero_mode_alignment(s.report, p.dtheta), 0.999);
  EXPECT_GT(s.report.lambda0, 0.0);
  EXPECT_NEAR(lambda0_deflated(s.op, p.dtheta), s.report.lambda0, 1e-6);
}

TEST(Spectra, CompanionMatchesRootMap) {
  const auto& s = small_spectrum();
  for (double nu : {0.5, 2.0}) {
    const BlockSpectrumReport b = companion_spectrum(s.op, nu, s.report);
    EXPECT_FALSE(b.mismatch_flag) << "mismatch " << b.mismatch;
    EXPECT_TRUE(b.gap_ok);
    EXPECT_LT(b.translation_zero_error, 1e-7);
    EXPECT_LT(b.translation_minus_nu_error, 1e-7);
    EXPECT_LT(b.parity_leak, 1e-12);
    EXPECT_EQ(b.block_eigenvalues.size(), 2 * static_cast<std::size_t>(s.report.eigenvalues.size()));
  }
}

TEST(Spectra, ProjectorAlgebra) {
  const WallProfile& p = fixtures::small_wall();
  const auto& s = small_spectrum();
  const ProjectorData pd = build_projector(p, 1.0);
  const PairState u{random_compact_field(p.theta.grid(), 1), random_compact_field(p.theta.grid(), 2),
                    StateMode::perturbation};
  const PairState pu = project(u, pd);
  EXPECT_LT(pair_norm_x(project(pu, pd) - pu), 1e-12 * pair_norm_x(pu));
  EXPECT_LT(pair_norm_x(project(pd.theta_mode, pd)), 1e-12);
  EXPECT_LT(std::abs(x_pairing(pu, pd)), 1e-12 * pair_norm_x(pu));
  const PairState au = apply_block(u, s.coeffs, 1.0);
  EXPECT_LT(std::abs(x_pairing(au, pd)), 1e-7 * std::sqrt(pair_inner_l2(au, au) * pair_inner_l2(pd.phi0, pd.phi0)));
}

TEST(Spectra, ResolventInequality) {
  const WallProfile& p = fixtures::small_wall();
  const auto& s = small_spectrum();
  const ResolventSolver solver(s.op, p.dtheta, 1.0);
  auto orth = [&](Field f) { return f - (inner_l2(f, p.dtheta) / inner_l2(p.dtheta, p.dtheta)) * p.dtheta; };
  for (std::uint64_t k = 0; k < 5; ++k) {
    const cplx lambda(0.2 + 0.5 * static_cast<double>(k), 1.0 - static_cast<double>(k));
    const ResolventReport r = solver.solve(lambda, orth(random_compact_field(p.theta.grid(), 10 + k)),
                                           orth(random_compact_field(p.theta.grid(), 20 + k)));
    EXPECT_LE(r.lhs, r.rhs);
    EXPECT_LT(r.residual, 1e-10);
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "neelwall/diagnostics.hpp"
#include "neelwall/spectral.hpp"
#include "oracles.hpp"
#include "fixtures.hpp"

using namespace neel;

namespace {

Field gaussian(const GridPtr& g, double center = 0.0, double width = 1.0) {
  return Field::sample(g, [=](double x) { return std::exp(-(x - center) * (x - center) / (width * width)); });
}

double max_diff(const Field& f, const std::vector<double>& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

}  // namespace

TEST(Grid, NodesAndCenter) {
  auto g = make_grid(64, 8.0);
  EXPECT_EQ(g->size(), 64u);
  EXPECT_DOUBLE_EQ(g->spacing(), 0.25);
  EXPECT_DOUBLE_EQ(g->node(0), -8.0);
  EXPECT_EQ(g->node(g->center_index()), 0.0);
  EXPECT_EQ(g->mirror_index(0), 0u);
  EXPECT_EQ(g->mirror_index(1), 63u);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(100, 8.0), Error);
  EXPECT_THROW(make_grid(64, 0.0), Error);
  EXPECT_THROW(make_grid(64, 8.0, 0), Error);
  EXPECT_TRUE(is_power_of_two(1024));
  EXPECT_FALSE(is_power_of_two(1000));
}

TEST(Field, GridMismatchThrows) {
  Field a = Field::zeros(make_grid(64, 8.0));
  Field b = Field::zeros(make_grid(64, 9.0));
  EXPECT_THROW(a + b, Error);
}

TEST(Spectral, PeriodicMultipliersMatchDirectSums) {
  auto g = make_grid(64, 6.0);
  Field f = Field::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); });
  const auto fv = fixtures::to_vector(f);
  const double r = g->half_width();
  EXPECT_LT(max_diff(derivative(f), oracle::apply_multiplier(fv, r, false, [](double k) {
              return std::complex<double>(0.0, k);
            })),
            1e-12);
  EXPECT_LT(max_diff(second_derivative(f), oracle::apply_multiplier(fv, r, false, [](double k) {
              return std::complex<double>(-k * k, 0.0);
            })),
            1e-11);
  EXPECT_LT(max_diff(half_laplacian(f), oracle::apply_multiplier(fv, r, false, [](double k) {
              return std::complex<double>(std::abs(k), 0.0);
            })),
            1e-12);
  EXPECT_LT(max_diff(bessel_inverse(f), oracle::apply_multiplier(fv, r, false, [](double k) {
              return std::complex<double>(1.0 / (1.0 + k * k), 0.0);
            })),
            1e-13);
}

TEST(Spectral, AntiperiodicMultipliersMatchDirectSums) {
  auto g = make_grid(64, 6.0);
  Field f = Field::sample(g, [](double x) { return std::tanh(x) * std::exp(-0.1 * x * x) + 0.2 / std::cosh(x); });
  const auto fv = fixtures::to_vector(f);
  const double r = g->half_width();
  EXPECT_LT(max_diff(derivative(f, Twist::antiperiodic),
                     oracle::apply_multiplier(fv, r, true, [](double k) { return std::complex<double>(0.0, k); })),
            1e-12);
  EXPECT_LT(max_diff(one_plus_half_laplacian(f, Twist::antiperiodic),
                     oracle::apply_multiplier(fv, r, true, [](double k) {
                       return std::complex<double>(1.0 + std::abs(k), 0.0);
                     })),
            1e-12);
}

TEST(Spectral, HalfLaplacianIsHilbertOfDerivative) {
  auto g = make_grid(1024, 40.0);
  for (double c : {0.0, 3.5, -7.25}) {
    Field f = gaussian(g, c, 1.3);
    EXPECT_LT((half_laplacian(f) - hilbert_transform(derivative(f))).max_abs(), 1e-9);
  }
}

TEST(Spectral, DerivativeOfGaussianIsExact) {
  auto g = make_grid(512, 20.0);
  Field f = gaussian(g);
  Field exact = Field::sample(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
  EXPECT_LT((derivative(f) - exact).max_abs(), 1e-12);
}

TEST(Spectral, GaussianHalfSeminorm) {
  auto g = make_grid(1024, 40.0);
  Field f = gaussian(g);
  const double seminorm = b_form(f, f) - inner_l2(f, f);
  EXPECT_NEAR(seminorm, oracle::gaussian_half_seminorm_box(40.0), 1e-6);
  EXPECT_NEAR(seminorm, oracle::gaussian_half_seminorm(), 1e-3);
  // The L2 term of b against its closed form sqrt(pi/2).
  EXPECT_NEAR(inner_l2(f, f), std::sqrt(std::numbers::pi / 2.0), 1e-12);
}

TEST(Spectral, PlancherelAndInnerProducts) {
  auto g = make_grid(256, 15.0);
  Field f = gaussian(g, 1.0);
  Field h = gaussian(g, -0.5, 2.0);
  EXPECT_NEAR(plancherel_l2(f, h), inner_l2(f, h), 1e-13);
  const double h1 = inner_l2(f, h) + inner_l2(derivative(f), derivative(h));
  EXPECT_NEAR(inner_h1(f, h), h1, 1e-12);
  EXPECT_NEAR(norm_h1(f), std::sqrt(inner_h1(f, f)), 1e-14);
}

TEST(Spectral, TranslateShiftsAGaussian) {
  auto g = make_grid(512, 20.0);
  Field f = gaussian(g);
  Field moved = translate(f, 0.37);
  Field exact = Field::sample(g, [](double x) { return std::exp(-(x + 0.37) * (x + 0.37)); });
  EXPECT_LT((moved - exact).max_abs(), 1e-12);
}

TEST(Spectral, FarFieldWarningOnNonDecayingInput) {
  reset_warnings();
  auto g = make_grid(128, 10.0);
  Field f = Field::sample(g, [](double x) { return 1.0 + 0.1 * x; });
  half_laplacian(f);
  EXPECT_GE(warning_count(WarningCode::far_field_violation), 1u);
  reset_warnings();
  half_laplacian(gaussian(g));
  EXPECT_EQ(warning_count(WarningCode::far_field_violation), 0u);
}

TEST(Spectral, PaddingMatchesTheWiderBox) {
  // A padded periodic application is the same computation on a box twice as
  // long with the field extended by zero.
  auto padded = make_grid(256, 15.0, 2);
  auto wide = make_grid(512, 30.0);
  Field a = gaussian(padded);
  Field b = gaussian(wide);
  Field ha = half_laplacian(a);
  Field hb = half_laplacian(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(ha[i] - hb[i + 128]));
  EXPECT_LT(m, 1e-12);
}

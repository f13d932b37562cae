#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

std::vector<double> apply_multiplier(const std::vector<double>& f, double half_width, bool antiperiodic,
                                     const Symbol& symbol) {
  const std::size_t n = f.size();
  const double h = 2.0 * half_width / static_cast<double>(n);
  const double pi = std::numbers::pi;
  std::vector<double> out(n, 0.0);
  const long lo = -static_cast<long>(n) / 2;
  const long hi = static_cast<long>(n) / 2;
  for (long j = lo; j < hi; ++j) {
    const double shift = antiperiodic ? 0.5 : 0.0;
    const double k = pi * (static_cast<double>(j) + shift) / half_width;
    std::complex<double> c = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double x = -half_width + static_cast<double>(m) * h;
      c += f[m] * std::exp(std::complex<double>(0.0, -k * x));
    }
    c /= static_cast<double>(n);
    std::complex<double> s = symbol(k);
    if (!antiperiodic && j == lo) s = s.real();
    for (std::size_t m = 0; m < n; ++m) {
      const double x = -half_width + static_cast<double>(m) * h;
      out[m] += (s * c * std::exp(std::complex<double>(0.0, k * x))).real();
    }
  }
  return out;
}

double box_inner(const std::vector<double>& f, const std::vector<double>& g, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * h;
}

double line_energy_arcsin_tanh() {
  // theta' = cos theta = sech x: ||sech||^2 = 2, and with the transform
  // pi sech(pi k / 2) the half seminorm is pi int_0^inf k sech^2(pi k / 2) dk = 4 ln 2 / pi.
  return 0.5 * (2.0 + 2.0 + 4.0 * std::numbers::ln2 / std::numbers::pi);
}

double gaussian_half_seminorm() {
  // (1 / 2 pi) int |k| pi exp(-k^2 / 2) dk = 1.
  return 1.0;
}

double gaussian_half_seminorm_box(double half_width) {
  const double dk = std::numbers::pi / half_width;
  return gaussian_half_seminorm() - dk * dk / 12.0;
}

std::vector<double> asymptotic_symbol_spectrum(std::size_t n, double half_width) {
  std::vector<double> out;
  const long lo = -static_cast<long>(n) / 2;
  for (long j = lo; j < static_cast<long>(n) / 2; ++j) {
    const double k = std::numbers::pi * static_cast<double>(j) / half_width;
    out.push_back(1.0 + std::abs(k) + k * k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double central_difference(const std::function<double(double)>& f, double eps) {
  return (f(eps) - f(-eps)) / (2.0 * eps);
}

double second_difference(const std::function<double(double)>& f, double eps) {
  return (f(eps) - 2.0 * f(0.0) + f(-eps)) / (eps * eps);
}

std::vector<double> synthetic_decay(const std::vector<double>& t, double a, double w, double ripple) {
  std::vector<double> y;
  for (double s : t) y.push_back(a * std::exp(-w * s) * (1.0 + ripple * std::sin(3.0 * s)));
  return y;
}

}  // namespace oracle

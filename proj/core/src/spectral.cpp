#include "neelwall/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "fft.hpp"
#include "neelwall/diagnostics.hpp"
#include "neelwall/errors.hpp"
#include "spectral_detail.hpp"

namespace neel {
namespace detail {
namespace {

constexpr double kPi = std::numbers::pi;

// Antiperiodic fields are modulated by e^{i kappa x}, kappa = pi / (2R),
// which makes them periodic.
std::vector<cd> modulation(const Grid& grid, double sign) {
  const double kappa = kPi / grid.length();
  std::vector<cd> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = std::polar(1.0, sign * kappa * grid.node(i));
  }
  return m;
}

using ModKey = std::tuple<std::size_t, double, int>;

const std::vector<cd>& cached_modulation(const Grid& grid, double sign) {
  static std::mutex mutex;
  static std::map<ModKey, std::unique_ptr<std::vector<cd>>> cache;
  std::lock_guard lock(mutex);
  ModKey key{grid.size(), grid.half_width(), sign > 0 ? 1 : -1};
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<std::vector<cd>>(modulation(grid, sign));
  return *slot;
}

cd eval_std(StdSymbol s, double k) {
  switch (s) {
    case StdSymbol::d1: return {0.0, k};
    case StdSymbol::d2: return {-k * k, 0.0};
    case StdSymbol::one_plus_abs: return {1.0 + std::abs(k), 0.0};
    case StdSymbol::bessel_inverse: return {1.0 / (1.0 + k * k), 0.0};
  }
  return {0.0, 0.0};
}

bool is_periodic_nyquist(std::size_t j, std::size_t n, Twist twist) {
  return twist == Twist::periodic && j == n / 2;
}

std::vector<cd> tabulate(std::size_t n, double r, Twist twist,
                         const Symbol& symbol) {
  const auto k = box_wavenumbers(n, r, twist);
  std::vector<cd> t(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cd m = symbol(k[j]);
    t[j] = is_periodic_nyquist(j, n, twist) ? cd(m.real(), 0.0) : m;
  }
  return t;
}

using TableKey = std::tuple<std::size_t, double, int, int>;

const std::vector<cd>& cached_table(std::size_t n, double r, Twist twist,
                                    StdSymbol s) {
  static std::mutex mutex;
  static std::map<TableKey, std::unique_ptr<std::vector<cd>>> cache;
  std::lock_guard lock(mutex);
  TableKey key{n, r, static_cast<int>(twist), static_cast<int>(s)};
  auto& slot = cache[key];
  if (!slot) {
    slot = std::make_unique<std::vector<cd>>(
        tabulate(n, r, twist, [s](double k) { return eval_std(s, k); }));
  }
  return *slot;
}

Field apply_table(const Field& f, const std::vector<cd>& table, Twist twist) {
  auto spec = forward(f, twist);
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= table[j];
  return inverse_real(f.grid(), std::move(spec), twist);
}

// Zero-padded periodic application: the box is embedded in the middle of a
// box pad_factor times as long.
Field apply_padded(const Field& f, const std::vector<cd>& table) {
  const Grid& g = *f.grid();
  const std::size_t n = g.size();
  const std::size_t big = n * g.pad_factor();
  const std::size_t offset = (big - n) / 2;
  std::vector<cd> buf(big, cd(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) buf[offset + i] = f[i];
  fft_forward(buf);
  for (std::size_t j = 0; j < big; ++j) buf[j] *= table[j];
  fft_inverse(buf);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(big);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[offset + i].real() * scale;
  return Field(f.grid(), std::move(out));
}

}  // namespace

std::vector<double> box_wavenumbers(std::size_t n, double r, Twist twist) {
  std::vector<double> k(n);
  const auto nn = static_cast<long long>(n);
  const double kappa = kPi / (2.0 * r);
  for (std::size_t j = 0; j < n; ++j) {
    auto jj = static_cast<long long>(j);
    if (jj > nn / 2) jj -= nn;
    k[j] = kPi * static_cast<double>(jj) / r;
    if (twist == Twist::antiperiodic) k[j] -= kappa;
  }
  return k;
}

std::vector<cd> forward(const Field& f, Twist twist) {
  const std::size_t n = f.size();
  std::vector<cd> buf(n);
  if (twist == Twist::antiperiodic) {
    const auto& mod = cached_modulation(*f.grid(), 1.0);
    for (std::size_t i = 0; i < n; ++i) buf[i] = f[i] * mod[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) buf[i] = f[i];
  }
  fft_forward(buf);
  return buf;
}

Field inverse_real(const GridPtr& grid, std::vector<cd> spec, Twist twist) {
  const std::size_t n = spec.size();
  fft_inverse(spec);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  if (twist == Twist::antiperiodic) {
    const auto& mod = cached_modulation(*grid, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = (spec[i] * mod[i]).real() * scale;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real() * scale;
  }
  return Field(grid, std::move(out));
}

Field box_multiplier(const Field& f, const Symbol& symbol, Twist twist) {
  const Grid& g = *f.grid();
  return apply_table(f, tabulate(g.size(), g.half_width(), twist, symbol),
                     twist);
}

Field box_multiplier(const Field& f, StdSymbol symbol, Twist twist) {
  const Grid& g = *f.grid();
  return apply_table(f, cached_table(g.size(), g.half_width(), twist, symbol),
                     twist);
}

namespace {

bool padded(const Field& f, Twist twist) {
  return twist == Twist::periodic && f.grid()->pad_factor() > 1;
}

const std::vector<cd>& padded_table(const Grid& g, StdSymbol s) {
  return cached_table(g.size() * g.pad_factor(),
                      g.half_width() * static_cast<double>(g.pad_factor()),
                      Twist::periodic, s);
}

// Spectra used by the quadratic forms; on padded grids the zero extension.
struct FormSpectra {
  std::vector<cd> a;
  std::vector<cd> b;
  std::vector<double> k;
  double weight;  // h / N
};

FormSpectra form_spectra(const Field& f, const Field& g, Twist twist) {
  require_same_grid(f, g);
  const Grid& grid = *f.grid();
  FormSpectra s;
  s.weight = grid.spacing();
  if (padded(f, twist)) {
    const std::size_t n = grid.size();
    const std::size_t big = n * grid.pad_factor();
    const std::size_t offset = (big - n) / 2;
    s.a.assign(big, cd(0.0, 0.0));
    s.b.assign(big, cd(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      s.a[offset + i] = f[i];
      s.b[offset + i] = g[i];
    }
    fft_forward(s.a);
    fft_forward(s.b);
    s.k = box_wavenumbers(big,
                          grid.half_width() *
                              static_cast<double>(grid.pad_factor()),
                          twist);
    s.weight /= static_cast<double>(big);
  } else {
    s.a = forward(f, twist);
    s.b = forward(g, twist);
    s.k = box_wavenumbers(grid.size(), grid.half_width(), twist);
    s.weight /= static_cast<double>(grid.size());
  }
  return s;
}

}  // namespace

Field apply_std(const Field& f, StdSymbol s, Twist twist) {
  if (padded(f, twist)) return apply_padded(f, padded_table(*f.grid(), s));
  return box_multiplier(f, s, twist);
}

}  // namespace detail

using detail::cd;
using detail::StdSymbol;

Field apply_multiplier(const Field& f, const Symbol& symbol, Twist twist) {
  if (detail::padded(f, twist)) {
    const Grid& g = *f.grid();
    return detail::apply_padded(
        f, detail::tabulate(g.size() * g.pad_factor(),
                            g.half_width() * static_cast<double>(g.pad_factor()),
                            twist, symbol));
  }
  return detail::box_multiplier(f, symbol, twist);
}

Field derivative(const Field& f, Twist twist) {
  return detail::apply_std(f, StdSymbol::d1, twist);
}

Field second_derivative(const Field& f, Twist twist) {
  return detail::apply_std(f, StdSymbol::d2, twist);
}

Field half_laplacian(const Field& f, Twist twist) {
  if (twist == Twist::periodic) check_far_field(f, "half_laplacian");
  return apply_multiplier(f, [](double k) { return cd(std::abs(k), 0.0); },
                          twist);
}

Field one_plus_half_laplacian(const Field& f, Twist twist) {
  if (twist == Twist::periodic) check_far_field(f, "one_plus_half_laplacian");
  return detail::apply_std(f, StdSymbol::one_plus_abs, twist);
}

Field bessel_inverse(const Field& f, Twist twist) {
  return detail::apply_std(f, StdSymbol::bessel_inverse, twist);
}

Field hilbert_transform(const Field& f, Twist twist) {
  return apply_multiplier(
      f,
      [](double k) {
        return cd(0.0, k > 0.0 ? -1.0 : (k < 0.0 ? 1.0 : 0.0));
      },
      twist);
}

Field translate(const Field& f, double delta, Twist twist) {
  return apply_multiplier(f, [delta](double k) { return std::polar(1.0, k * delta); },
                          twist);
}

std::vector<double> wavenumbers(const Grid& grid, Twist twist) {
  return detail::box_wavenumbers(grid.size(), grid.half_width(), twist);
}

std::vector<std::complex<double>> spectrum(const Field& f, Twist twist) {
  return detail::forward(f, twist);
}

double inner_l2(const Field& f, const Field& g) {
  require_same_grid(f, g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid()->spacing();
}

double norm_l2(const Field& f) { return std::sqrt(inner_l2(f, f)); }

double inner_h1(const Field& f, const Field& g, Twist twist) {
  return inner_l2(f, g) + inner_l2(derivative(f, twist), derivative(g, twist));
}

double norm_h1(const Field& f, Twist twist) {
  return std::sqrt(inner_h1(f, f, twist));
}

double plancherel_l2(const Field& f, const Field& g, Twist twist) {
  const auto s = detail::form_spectra(f, g, twist);
  double acc = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) {
    acc += (s.a[j] * std::conj(s.b[j])).real();
  }
  return acc * s.weight;
}

double b_form(const Field& f, const Field& g, Twist twist) {
  const auto s = detail::form_spectra(f, g, twist);
  double acc = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) {
    acc += (1.0 + std::abs(s.k[j])) * (s.a[j] * std::conj(s.b[j])).real();
  }
  return acc * s.weight;
}

double far_field_excess(const Field& f) {
  const std::size_t n = f.size();
  const std::size_t m = std::max<std::size_t>(1, n / 100);
  double e = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    e = std::max({e, std::abs(f[i]), std::abs(f[n - 1 - i])});
  }
  return e;
}

bool check_far_field(const Field& f, std::string_view what) {
  const double excess = far_field_excess(f);
  if (excess <= far_field_tolerance()) return true;
  emit_warning(WarningCode::far_field_violation,
               std::string(what) + ": |f| = " + std::to_string(excess) +
                   " near the box ends");
  return false;
}

}  // namespace neel

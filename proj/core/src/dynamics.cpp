#include "neelwall/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "neelwall/spectral.hpp"
#include "spectral_detail.hpp"

namespace neel {
namespace {

constexpr double kPi = std::numbers::pi;

// Wall translates and their first two derivatives from one spectrum of the
// periodic part.
class TranslateFamily {
 public:
  explicit TranslateFamily(const Field& theta)
      : grid_(theta.grid()),
        p_hat_(spectrum(wall_periodic_part(theta))),
        k_(wavenumbers(*grid_, Twist::periodic)),
        slope_(kPi / grid_->length()),
        ramp_(wall_ramp(grid_)) {}

  struct Sample {
    Field value;
    Field first;
    Field second;
  };

  Sample at(double delta, bool with_second) const {
    const std::size_t n = k_.size();
    std::vector<std::complex<double>> s0(n), s1(n), s2;
    if (with_second) s2.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const bool nyq = j == n / 2;
      const std::complex<double> ph = std::polar(1.0, k_[j] * delta);
      const std::complex<double> m0 = nyq ? std::complex<double>(ph.real(), 0.0) : ph;
      const std::complex<double> ik(0.0, k_[j]);
      const std::complex<double> m1 = nyq ? std::complex<double>((ik * ph).real(), 0.0) : ik * ph;
      s0[j] = p_hat_[j] * m0;
      s1[j] = p_hat_[j] * m1;
      if (with_second) s2[j] = p_hat_[j] * (-k_[j] * k_[j]) * m0;
    }
    Sample out{inverse(std::move(s0)), inverse(std::move(s1)), Field()};
    const double offset = slope_ * delta;
    for (std::size_t i = 0; i < n; ++i) {
      out.value[i] += ramp_[i] + offset;
      out.first[i] += slope_;
    }
    if (with_second) out.second = inverse(std::move(s2));
    return out;
  }

 private:
  Field inverse(std::vector<std::complex<double>> s) const {
    return detail::inverse_real(grid_, std::move(s), Twist::periodic);
  }

  GridPtr grid_;
  std::vector<std::complex<double>> p_hat_;
  std::vector<double> k_;
  double slope_;
  Field ramp_;
};

double objective(const Field& theta, const TranslateFamily& fam, double delta) {
  const Field d = theta - fam.at(delta, false).value;
  return inner_l2(d, d);
}

// Newton iteration on g(delta) = <theta - T theta_bar, (T theta_bar)'>,
// the stationarity condition of the L2 misfit. Returns nullopt when it
// leaves [lo, hi] or stalls.
std::optional<double> newton_refine(const Field& theta, const TranslateFamily& fam,
                                    double start, double lo, double hi) {
  double delta = start;
  for (int it = 0; it < 30; ++it) {
    const auto s = fam.at(delta, true);
    const Field r = theta - s.value;
    const double g = inner_l2(r, s.first);
    const double dg = -inner_l2(s.first, s.first) + inner_l2(r, s.second);
    if (!(dg < 0.0)) return std::nullopt;
    const double step = -g / dg;
    delta += step;
    if (!(delta >= lo && delta <= hi)) return std::nullopt;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(delta))) return delta;
  }
  return delta;
}

ShiftEstimate finish(const Field& theta, const TranslateFamily& fam, double delta) {
  const Field d = theta - fam.at(delta, false).value;
  ShiftEstimate e;
  e.delta = delta;
  e.l2_distance = norm_l2(d);
  e.distance = norm_h1(d);
  return e;
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

PairState rhs_full(const PairState& state, double nu) {
  Field accel = -energy_gradient(state.first);
  accel -= nu * state.second;
  return {state.second, std::move(accel), state.mode};
}

PairState rhs_linear(const PairState& state, const CoefficientSet& coeffs, double nu) {
  Field accel = -apply_L(state.first, coeffs);
  accel -= nu * state.second;
  return {state.second, std::move(accel), state.mode};
}

double cfl_limit(const Grid& grid, double c_cfl) {
  const double k = kPi / grid.spacing();
  return c_cfl / std::sqrt(1.0 + k + k * k);
}

PairState step_rk4(const PairState& state, double dt, const Rhs& rhs, double dt_max) {
  if (!(dt > 0.0) || dt > dt_max) {
    throw Error(ErrorCode::cfl_violation,
                "dt = " + std::to_string(dt) + " exceeds dt_max = " + std::to_string(dt_max));
  }
  const PairState k1 = rhs(state);
  const PairState k2 = rhs(state + (0.5 * dt) * k1);
  const PairState k3 = rhs(state + (0.5 * dt) * k2);
  const PairState k4 = rhs(state + dt * k3);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void validate(const EvolveConfig& cfg, const Grid& grid) {
  if (!(cfg.nu >= 0.0)) throw Error(ErrorCode::config_error, "nu must be nonnegative");
  if (!(cfg.T > 0.0)) throw Error(ErrorCode::config_error, "T must be positive");
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::config_error, "dt must be positive");
  if (cfg.every == 0) throw Error(ErrorCode::config_error, "every must be >= 1");
  if (!(cfg.blow_up_factor > 1.0)) {
    throw Error(ErrorCode::config_error, "blow_up_factor must exceed 1");
  }
  const double steps = cfg.T / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw Error(ErrorCode::config_error, "T must be a whole multiple of dt");
  }
  const double dt_max = cfl_limit(grid, cfg.c_cfl);
  if (cfg.dt > dt_max) {
    throw Error(ErrorCode::cfl_violation,
                "dt = " + std::to_string(cfg.dt) + " exceeds dt_max = " + std::to_string(dt_max));
  }
}

BlowUp::BlowUp(const std::string& message, std::vector<TraceRecord> partial)
    : Error(ErrorCode::blow_up, message), partial_(std::move(partial)) {}

EvolveResult evolve(const PairState& initial, const WallProfile& profile,
                    const EvolveConfig& cfg) {
  const GridPtr& grid = profile.theta.grid();
  require_same_grid(initial.first, profile.theta);
  require_same_grid(initial.second, profile.theta);
  validate(cfg, *grid);
  const bool full = initial.mode == StateMode::full_phase;
  const double nu = cfg.nu;

  std::optional<CoefficientSet> coeffs;
  std::optional<ProjectorData> projector;
  if (!full) {
    coeffs = build_coefficients(profile);
    projector = build_projector(profile, nu > 0.0 ? nu : 1.0);
  }

  auto rhs = [&](const PairState& s) {
    return full ? rhs_full(s, nu) : rhs_linear(s, *coeffs, nu);
  };

  std::vector<TraceRecord> trace;
  double last_shift = 0.0;
  bool have_shift = false;
  auto record = [&](double t, const PairState& s, double dissipation) {
    TraceRecord r;
    r.t = t;
    r.kinetic = 0.5 * inner_l2(s.second, s.second);
    r.dissipation_integral = dissipation;
    if (full) {
      const ShiftEstimate e = extract_shift(
          s.first, profile, have_shift ? std::optional<double>(last_shift) : std::nullopt);
      last_shift = e.delta;
      have_shift = true;
      r.shift = e.delta;
      r.h1_distance = e.distance;
      r.potential = energy(s.first);
    } else {
      r.shift = x_pairing(s, *projector) / projector->xi;
      r.h1_distance = pair_norm_x(project(s, *projector));
      r.potential = 0.5 * inner_l2(apply_L(s.first, *coeffs), s.first);
    }
    trace.push_back(r);
    return r;
  };

  PairState state = initial;
  double dissipation = 0.0;
  const TraceRecord first = record(0.0, state, 0.0);
  const double reference = std::max(
      std::sqrt(first.h1_distance * first.h1_distance + 2.0 * first.kinetic), 1e-6);

  const auto steps = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
  const double dt = cfg.dt;
  for (std::size_t step = 1; step <= steps; ++step) {
    // RK4 on (first, second, dissipation) with d/dt dissipation = nu ||second||^2.
    const PairState k1 = rhs(state);
    const double q1 = nu * inner_l2(state.second, state.second);
    const PairState s2 = state + (0.5 * dt) * k1;
    const PairState k2 = rhs(s2);
    const double q2 = nu * inner_l2(s2.second, s2.second);
    const PairState s3 = state + (0.5 * dt) * k2;
    const PairState k3 = rhs(s3);
    const double q3 = nu * inner_l2(s3.second, s3.second);
    const PairState s4 = state + dt * k3;
    const PairState k4 = rhs(s4);
    const double q4 = nu * inner_l2(s4.second, s4.second);
    state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    dissipation += dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);

    if (!state.first.all_finite() || !state.second.all_finite()) {
      throw BlowUp("non-finite state at t = " + std::to_string(step * dt), trace);
    }
    if (step % cfg.every == 0 || step == steps) {
      const double t = static_cast<double>(step) * dt;
      TraceRecord r;
      try {
        r = record(t, state, dissipation);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::blow_up) throw;
        throw BlowUp("diagnostics failed at t = " + std::to_string(t) + ": " + e.what(),
                     trace);
      }
      const double size = std::sqrt(r.h1_distance * r.h1_distance + 2.0 * r.kinetic);
      if (size > cfg.blow_up_factor * reference) {
        throw BlowUp("perturbation grew to " + std::to_string(size) + " at t = " +
                         std::to_string(t),
                     trace);
      }
    }
  }
  return {std::move(trace), std::move(state)};
}

ShiftEstimate extract_shift(const Field& theta, const WallProfile& profile,
                            std::optional<double> guess) {
  require_same_grid(theta, profile.theta);
  const TranslateFamily fam(profile.theta);
  const double limit = 0.5 * profile.theta.grid()->half_width();

  if (guess && std::abs(*guess) < limit) {
    const double lo = std::max(-limit, *guess - 1.0);
    const double hi = std::min(limit, *guess + 1.0);
    if (auto d = newton_refine(theta, fam, *guess, lo, hi)) return finish(theta, fam, *d);
  }

  // Coarse scan, then golden section inside the best bracket.
  const double spacing = std::min(0.25, limit / 8.0);
  const auto count = static_cast<std::size_t>(std::floor(2.0 * limit / spacing)) + 1;
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    samples[i] = -limit + static_cast<double>(i) * spacing;
    const double v = objective(theta, fam, samples[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == count) {
    throw Error(ErrorCode::no_bracket, "no interior minimum for |delta| <= R/2");
  }
  double a = samples[best - 1];
  double b = samples[best + 1];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = objective(theta, fam, c);
  double fd = objective(theta, fam, d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = objective(theta, fam, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = objective(theta, fam, d);
    }
  }
  const double golden = 0.5 * (a + b);
  const double lo = samples[best - 1];
  const double hi = samples[best + 1];
  const auto refined = newton_refine(theta, fam, golden, lo, hi);
  return finish(theta, fam, refined ? *refined : golden);
}

DecayFit decay_fit(const std::vector<TraceRecord>& trace, double t_start, double t_end) {
  std::vector<double> t;
  std::vector<double> y;
  for (const auto& r : trace) {
    if (r.t < t_start || r.t > t_end) continue;
    if (!(r.h1_distance >= 1e-12)) {
      throw Error(ErrorCode::degenerate_fit,
                  "distance " + std::to_string(r.h1_distance) + " at t = " +
                      std::to_string(r.t) + " is below the roundoff floor");
    }
    t.push_back(r.t);
    y.push_back(std::log(r.h1_distance));
  }
  if (t.size() < 3) throw Error(ErrorCode::degenerate_fit, "fewer than 3 points in window");
  const auto m = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double tm = st / m;
  const double ym = sy / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (!(stt > 0.0)) throw Error(ErrorCode::degenerate_fit, "window has a single time");
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = y[i] - (intercept + slope * t[i]);
    ss_res += e * e;
  }
  DecayFit fit;
  fit.omega = -slope;
  fit.amplitude = std::exp(intercept);
  fit.t_start = t.front();
  fit.t_end = t.back();
  fit.points = t.size();
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

DecayFit decay_fit(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw Error(ErrorCode::degenerate_fit, "empty trace");
  const double t0 = trace.front().t;
  const double span = trace.back().t - t0;
  return decay_fit(trace, t0 + 0.2 * span, t0 + 0.8 * span);
}

double linear_decay_prediction(const SpectrumReport& l_report, double nu) {
  double rate = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < l_report.eigenvalues.size(); ++i) {
    if (l_report.zero_mode_index && static_cast<std::size_t>(i) == *l_report.zero_mode_index) {
      continue;
    }
    const double mu = l_report.eigenvalues(i);
    if (!(mu > 0.0)) continue;
    rate = std::min(rate, -quadratic_roots(mu, nu).first.real());
  }
  return rate;
}

H2Report hypothesis_H2_check(const WallProfile& profile, const std::vector<double>& deltas) {
  H2Report r;
  r.deltas = deltas;
  const Field curvature = wall_second_derivative(profile.theta);
  r.constant = norm_h1(curvature) / std::sqrt(3.0);
  double lo = std::numeric_limits<double>::infinity();
  for (double delta : deltas) {
    const Field defect = translate_wall(profile.theta, delta) - profile.theta - delta * profile.dtheta;
    const double d = norm_h1(defect);
    r.defects.push_back(d);
    const double ratio = delta != 0.0 ? d / (delta * delta) : 0.0;
    r.ratios.push_back(ratio);
    if (delta != 0.0) {
      r.max_ratio = std::max(r.max_ratio, ratio);
      lo = std::min(lo, ratio);
    }
  }
  r.variation = r.max_ratio > 0.0 ? (r.max_ratio - lo) / r.max_ratio : 0.0;
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "loglog_slope needs matching samples");
  }
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const auto m = static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - sx / m;
    sxx += a * a;
    sxy += a * (std::log(y[i]) - sy / m);
  }
  return sxy / sxx;
}

H3Report hypothesis_H3_check(const WallProfile& profile, const std::vector<Field>& directions,
                             const std::vector<double>& amplitudes) {
  H3Report r;
  r.amplitudes = amplitudes;
  const CoefficientSet coeffs = build_coefficients(profile);
  r.min_slope = std::numeric_limits<double>::infinity();
  for (const Field& dir : directions) {
    std::vector<double> norms;
    for (double a : amplitudes) norms.push_back(norm_l2(nonlinear_remainder(a * dir, coeffs)));
    const bool zero = std::all_of(norms.begin(), norms.end(), [](double v) { return v == 0.0; });
    const double slope = zero ? std::numeric_limits<double>::infinity() : loglog_slope(amplitudes, norms);
    r.slopes.push_back(slope);
    r.min_slope = std::min(r.min_slope, slope);
    r.norms.push_back(std::move(norms));
  }
  return r;
}

PerturbationShape parse_shape(const std::string& name) {
  if (name == "even_bump") return PerturbationShape::even_bump;
  if (name == "odd_bump") return PerturbationShape::odd_bump;
  if (name == "eigenvector") return PerturbationShape::eigenvector;
  if (name == "random") return PerturbationShape::random;
  throw Error(ErrorCode::config_error, "unknown perturbation shape '" + name + "'");
}

const char* to_string(PerturbationShape shape) noexcept {
  switch (shape) {
    case PerturbationShape::even_bump: return "even_bump";
    case PerturbationShape::odd_bump: return "odd_bump";
    case PerturbationShape::eigenvector: return "eigenvector";
    case PerturbationShape::random: return "random";
  }
  return "unknown";
}

Field random_compact_field(const GridPtr& grid, std::uint64_t seed, double width, double k_max) {
  std::mt19937_64 gen(seed);
  constexpr int kModes = 12;
  std::vector<double> a(kModes + 1), b(kModes + 1);
  for (int j = 0; j <= kModes; ++j) {
    a[static_cast<std::size_t>(j)] = 2.0 * uniform01(gen) - 1.0;
    b[static_cast<std::size_t>(j)] = 2.0 * uniform01(gen) - 1.0;
  }
  const double center = (2.0 * uniform01(gen) - 1.0) * width * 0.5;
  return Field::sample(grid, [&](double x) {
    double s = 0.0;
    for (int j = 0; j <= kModes; ++j) {
      const double k = k_max * j / kModes;
      s += a[static_cast<std::size_t>(j)] * std::cos(k * x) + b[static_cast<std::size_t>(j)] * std::sin(k * x);
    }
    const double z = (x - center) / width;
    return s * std::exp(-0.5 * z * z);
  });
}

Field perturbation_shape(PerturbationShape shape, const WallProfile& profile, std::uint64_t seed) {
  const GridPtr& grid = profile.theta.grid();
  Field f;
  switch (shape) {
    case PerturbationShape::even_bump:
      f = Field::sample(grid, [](double x) { return std::exp(-x * x); });
      break;
    case PerturbationShape::odd_bump:
      f = Field::sample(grid, [](double x) { return x * std::exp(-x * x); });
      break;
    case PerturbationShape::random:
      f = random_compact_field(grid, seed);
      break;
    case PerturbationShape::eigenvector: {
      const CoefficientSet c = build_coefficients(profile);
      const auto op = assemble(OperatorKind::L, c);
      SpectrumOptions opt;
      opt.want_vectors = true;
      const SpectrumReport rep = eig_dense(op, opt);
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
        if (rep.zero_mode_index && static_cast<std::size_t>(i) == *rep.zero_mode_index) continue;
        pick = i;
        break;
      }
      const Eigen::VectorXd v = rep.eigenvectors.col(pick);
      f = Field(grid, std::vector<double>(v.data(), v.data() + v.size()));
      break;
    }
  }
  const double norm = norm_h1(f);
  if (!(norm > 0.0)) throw Error(ErrorCode::invalid_argument, "degenerate perturbation shape");
  return (1.0 / norm) * f;
}

}  // namespace neel

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neelwall/errors.hpp"
#include "neelwall/operators.hpp"
#include "neelwall/profile.hpp"
#include "neelwall/spectra.hpp"
#include "neelwall/state.hpp"

namespace neel {

struct TraceRecord {
  double t = 0.0;
  /// Full phase: ||theta - theta_bar(. + shift)||_{H1}.
  /// Perturbation: ||P U||_X.
  double h1_distance = 0.0;
  /// Full phase: fitted wall shift. Perturbation: Xi^{-1} <U, Phi_0>.
  double shift = 0.0;
  double kinetic = 0.0;
  /// Full phase: E(theta). Perturbation: <L u, u> / 2.
  double potential = 0.0;
  /// nu * int_0^t ||v||^2 ds.
  double dissipation_integral = 0.0;
};

struct DecayFit {
  double omega = 0.0;
  double amplitude = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

using Rhs = std::function<PairState(const PairState&)>;

/// (theta, phi) -> (phi, -nu phi - grad E(theta)).
PairState rhs_full(const PairState& state, double nu);
/// (u, v) -> (v, -L u - nu v).
PairState rhs_linear(const PairState& state, const CoefficientSet& coeffs,
                     double nu);

/// c_cfl / sqrt(1 + pi/h + (pi/h)^2).
double cfl_limit(const Grid& grid, double c_cfl = 2.5);

/// One classical RK4 step. Throws cfl_violation when dt > dt_max.
PairState step_rk4(const PairState& state, double dt, const Rhs& rhs,
                   double dt_max);

struct EvolveConfig {
  double nu = 1.0;
  double T = 40.0;
  double dt = 0.02;
  std::size_t every = 5;
  double c_cfl = 2.5;
  double blow_up_factor = 1e3;
};

void validate(const EvolveConfig& cfg, const Grid& grid);

class BlowUp : public Error {
 public:
  BlowUp(const std::string& message, std::vector<TraceRecord> partial);
  const std::vector<TraceRecord>& partial_trace() const noexcept {
    return partial_;
  }

 private:
  std::vector<TraceRecord> partial_;
};

struct EvolveResult {
  std::vector<TraceRecord> trace;
  PairState final_state;
};

/// Integrates the full or linearized system depending on initial.mode and
/// records diagnostics every `every` steps (and at t = 0).
EvolveResult evolve(const PairState& initial, const WallProfile& profile,
                    const EvolveConfig& cfg);

struct ShiftEstimate {
  double delta = 0.0;
  /// ||theta - theta_bar(. + delta)||_{H1}
  double distance = 0.0;
  double l2_distance = 0.0;
};

/// Minimizes ||theta - theta_bar(. + delta)||_{L2} over |delta| <= R/2.
/// With a guess the coarse scan is skipped unless refinement fails.
ShiftEstimate extract_shift(const Field& theta, const WallProfile& profile,
                            std::optional<double> guess = std::nullopt);

/// Least squares on log h1_distance over records with t in [t_start, t_end].
DecayFit decay_fit(const std::vector<TraceRecord>& trace, double t_start,
                   double t_end);
/// Default window [0.2 T, 0.8 T] of the trace span.
DecayFit decay_fit(const std::vector<TraceRecord>& trace);

/// Slowest decay rate min_{mu > 0} -Re(root of lambda^2 + nu lambda + mu)
/// over the nonzero eigenvalues of a spectrum report.
double linear_decay_prediction(const SpectrumReport& l_report, double nu);

struct H2Report {
  std::vector<double> deltas;
  std::vector<double> defects;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  /// ||theta''||_{H1} / sqrt(3)
  double constant = 0.0;
  /// (max ratio - min ratio) / max ratio over nonzero deltas.
  double variation = 0.0;
};

H2Report hypothesis_H2_check(const WallProfile& profile,
                             const std::vector<double>& deltas);

struct H3Report {
  std::vector<double> amplitudes;
  /// norms[d][a] = ||N(amplitude_a * direction_d)||_{L2}
  std::vector<std::vector<double>> norms;
  std::vector<double> slopes;
  double min_slope = 0.0;
};

H3Report hypothesis_H3_check(const WallProfile& profile,
                             const std::vector<Field>& directions,
                             const std::vector<double>& amplitudes);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class PerturbationShape { even_bump, odd_bump, eigenvector, random };

PerturbationShape parse_shape(const std::string& name);
const char* to_string(PerturbationShape shape) noexcept;

/// Shape normalized to unit H1 norm. `eigenvector` uses the first
/// non-translation eigenvector of L; `random` a smooth compact random field.
Field perturbation_shape(PerturbationShape shape, const WallProfile& profile,
                         std::uint64_t seed = 0);

/// Smooth random field with Gaussian envelope exp(-x^2 / (2 width^2)),
/// band-limited to |k| <= k_max.
Field random_compact_field(const GridPtr& grid, std::uint64_t seed,
                           double width = 4.0, double k_max = 3.0);

}  // namespace neel

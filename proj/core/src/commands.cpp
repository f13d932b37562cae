#include "neelwall/commands.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Core>

#include "json.hpp"
#include "neelwall/diagnostics.hpp"
#include "neelwall/dynamics.hpp"
#include "neelwall/operators.hpp"
#include "neelwall/spectra.hpp"
#include "neelwall/spectral.hpp"

extern "C" {
void openblas_set_num_threads(int) __attribute__((weak));
char* openblas_get_config(void) __attribute__((weak));
}

namespace neel {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using cplx = std::complex<double>;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

CheckResult named(std::string id, std::string description) {
  CheckResult c;
  c.id = std::move(id);
  c.description = std::move(description);
  return c;
}

json to_json(const CheckResult& c) {
  json j = {{"id", c.id},          {"description", c.description}, {"passed", c.passed},
            {"skipped", c.skipped}, {"detail", c.detail}};
  j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
  j["threshold"] = std::isfinite(c.threshold) ? json(c.threshold) : json(nullptr);
  return j;
}

CheckResult check_from_json(const json& j) {
  CheckResult c;
  c.id = j.at("id").get<std::string>();
  c.description = j.value("description", "");
  c.passed = j.value("passed", false);
  c.skipped = j.value("skipped", false);
  c.value = j["value"].is_number() ? j["value"].get<double>() : std::nan("");
  c.threshold = j["threshold"].is_number() ? j["threshold"].get<double>() : std::nan("");
  c.detail = j.value("detail", "");
  return c;
}

json checks_json(const std::vector<CheckResult>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}

std::string eigen_version() {
  std::ostringstream os;
  os << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  return os.str();
}

json versions_json() {
  json v = {{"neelwall", "0.1.0"},
            {"eigen", eigen_version()},
            {"fftw", std::string(fftw_version)},
            {"blas_kernel", linalg::blas_kernel()},
            {"compiler", std::string(__VERSION__)}};
  if (openblas_get_config != nullptr) v["openblas"] = openblas_get_config();
  return v;
}

fs::path out_dir(const RunConfig& cfg) { return fs::path(cfg.output.directory); }

/// Merges this command's entry into manifest.json and refreshes the checksum
/// of every file listed so far.
void update_manifest(const RunConfig& cfg, const std::string& command, const CommandOutcome& outcome,
                     const std::map<std::string, double>& timings) {
  const fs::path dir = out_dir(cfg);
  const fs::path path = dir / "manifest.json";
  json m = json::object();
  if (fs::exists(path)) {
    try {
      m = json::parse(read_text(path));
    } catch (const json::exception&) {
      m = json::object();
    }
  }
  m["config"] = json::parse(config_to_json(cfg));
  m["versions"] = versions_json();
  json files = m.contains("files") ? m["files"] : json::object();
  for (const auto& f : outcome.files) files[fs::relative(f, dir).generic_string()] = json::object();
  json refreshed = json::object();
  for (const auto& [name, value] : files.items()) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    refreshed[name] = {{"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}};
  }
  m["files"] = refreshed;
  json entry = {{"exit_code", static_cast<int>(outcome.exit_code)},
                {"timings_seconds", timings},
                {"checks", checks_json(outcome.checks)},
                {"errors", outcome.errors}};
  json emitted = json::array();
  for (const auto& f : outcome.files) emitted.push_back(fs::relative(f, dir).generic_string());
  entry["files"] = emitted;
  m["commands"][command] = entry;
  write_text(path, m.dump(2) + "\n");
}

void emit(CommandOutcome& out, const fs::path& path, const std::string& text) {
  write_text(path, text);
  out.files.push_back(path);
}

std::string complex_csv(const std::vector<cplx>& values, const std::string& kind) {
  std::string s;
  for (const auto& z : values) {
    s += format_number(z.real()) + "," + format_number(z.imag()) + "," + kind + "\n";
  }
  return s;
}

json complex_json(const std::vector<cplx>& values) {
  json a = json::array();
  for (const auto& z : values) a.push_back({z.real(), z.imag()});
  return a;
}

Field orthogonal_to(const Field& u, const Field& dir) {
  return u - (inner_l2(u, dir) / inner_l2(dir, dir)) * dir;
}

double energy_drift(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) return 0.0;
  const double e0 = trace.front().kinetic + trace.front().potential;
  double drift = 0.0;
  for (const auto& r : trace) {
    drift = std::max(drift, std::abs(r.kinetic + r.potential + r.dissipation_integral - e0));
  }
  return drift;
}

/// Largest shift increment between consecutive records in the last quarter.
double late_shift_increment(const std::vector<TraceRecord>& trace) {
  if (trace.size() < 2) return 0.0;
  const double t_late = trace.front().t + 0.75 * (trace.back().t - trace.front().t);
  double inc = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].t >= t_late) inc = std::max(inc, std::abs(trace[i].shift - trace[i - 1].shift));
  }
  return inc;
}

WallProfile load_profile_artifact(const RunConfig& cfg) {
  WallProfile p = read_profile(out_dir(cfg));
  const Grid& g = *p.theta.grid();
  if (g.size() != cfg.grid.n || g.half_width() != cfg.grid.half_width ||
      g.pad_factor() != cfg.grid.pad_factor) {
    throw Error(ErrorCode::config_error,
                "profile artifact in " + cfg.output.directory +
                    " was computed on a different grid; rerun 'solve-profile'");
  }
  return p;
}

// ---- spectrum checks -------------------------------------------------------

CheckResult check_translation_mode(const WallProfile& p, const SpectrumReport& rep, double alignment,
                                   double residual_ratio) {
  CheckResult c = named("translation_mode",
                "L theta' ~ 0, exactly one eigenvalue near 0, eigenvector along theta'");
  c.value = residual_ratio;
  c.threshold = 1e-6;
  c.passed = residual_ratio <= 1e-6 && rep.zero_mode_count == 1 && alignment >= 0.999;
  std::ostringstream os;
  os << "zero_count=" << rep.zero_mode_count << " |lambda|=" << rep.zero_mode_residual
     << " cos=" << alignment << " n=" << p.theta.size();
  c.detail = os.str();
  return c;
}

CheckResult check_operator_identities(const WallProfile& p, const CoefficientSet& coeffs,
                                      const DenseSymmetricOperator& op, std::uint64_t seed) {
  const GridPtr& g = p.theta.grid();
  double hilbert_err = 0.0;
  const std::array<std::function<double(double)>, 3> probes = {
      [](double x) { return std::exp(-x * x); },
      [](double x) { return x * std::exp(-x * x / 2.0); },
      [](double x) { return 1.0 / std::cosh(x) / std::cosh(x); }};
  for (const auto& fn : probes) {
    const Field f = Field::sample(g, fn);
    hilbert_err = std::max(hilbert_err,
                           (half_laplacian(f) - hilbert_transform(derivative(f))).max_abs());
  }
  double form_err = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Field u = random_compact_field(g, seed * 1000 + 2 * k);
    const Field v = random_compact_field(g, seed * 1000 + 2 * k + 1);
    const double lhs = inner_l2(apply_S(u, coeffs), v);
    const Field su = coeffs.s_theta * u;
    const Field sv = coeffs.s_theta * v;
    const double rhs = b_form(su, sv, Twist::antiperiodic);
    const double scale = std::sqrt(b_form(su, su, Twist::antiperiodic) * b_form(sv, sv, Twist::antiperiodic));
    form_err = std::max(form_err, std::abs(lhs - rhs) / std::max(scale, 1e-300));
  }
  CheckResult c = named("operator_identities",
                "half Laplacian = Hilbert o d/dx, <S u, v> = b[s u, s v], L symmetric");
  c.value = std::max(hilbert_err / 1e-9, std::max(form_err / 1e-9, op.raw_symmetry_defect / 1e-10));
  c.threshold = 1.0;
  c.passed = hilbert_err <= 1e-9 && form_err <= 1e-9 && op.raw_symmetry_defect <= 1e-10;
  std::ostringstream os;
  os << "hilbert_max=" << hilbert_err << " form_rel=" << form_err
     << " symmetry=" << op.raw_symmetry_defect << " (value = worst error / tolerance)";
  c.detail = os.str();
  return c;
}

CheckResult check_hessian(const WallProfile& p, const CoefficientSet& coeffs, double lambda0,
                          std::uint64_t seed) {
  const GridPtr& g = p.theta.grid();
  double worst_centered = std::numeric_limits<double>::infinity();
  double worst_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < 100; ++k) {
    Field u = random_compact_field(g, seed * 7919 + k);
    u[g->center_index()] = 0.0;
    const HessianCheck h = hessian_check(u, coeffs);
    const double h1 = norm_h1(u);
    worst_centered = std::min(worst_centered, (h.lhs - h.rhs) / (h1 * h1));
    const Field w = orthogonal_to(random_compact_field(g, seed * 7919 + 500 + k), p.dtheta);
    const double l2 = inner_l2(w, w);
    worst_gap = std::min(worst_gap, inner_l2(apply_L(w, coeffs), w) - lambda0 * l2 * (1.0 - 1e-8));
  }
  CheckResult c = named("hessian_positivity",
                "centered Hessian bound and Rayleigh quotient >= Lambda0 on the complement");
  c.value = worst_centered;
  c.threshold = -1e-8;
  c.passed = worst_centered >= -1e-8 && worst_gap >= 0.0;
  std::ostringstream os;
  os << "min centered slack / ||u||_H1^2=" << worst_centered << " min <Lu,u> - L0||u||^2(1-1e-8)="
     << worst_gap;
  c.detail = os.str();
  return c;
}

CheckResult check_projector(const WallProfile& p, const CoefficientSet& coeffs, double nu,
                            std::uint64_t seed) {
  const GridPtr& g = p.theta.grid();
  const ProjectorData pd = build_projector(p, nu);
  const double phi_norm = std::sqrt(pair_inner_l2(pd.phi0, pd.phi0));
  double idem = 0.0, kill = 0.0, ortho = 0.0, adjoint = 0.0;
  kill = pair_norm_x(project(pd.theta_mode, pd)) / pair_norm_x(pd.theta_mode);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const PairState u{random_compact_field(g, seed * 31 + 2 * k),
                      random_compact_field(g, seed * 31 + 2 * k + 1), StateMode::perturbation};
    const PairState pu = project(u, pd);
    idem = std::max(idem, pair_norm_x(project(pu, pd) - pu) / pair_norm_x(pu));
    ortho = std::max(ortho, std::abs(x_pairing(pu, pd)) /
                                (std::sqrt(pair_inner_l2(pu, pu)) * phi_norm));
    const PairState au = apply_block(u, coeffs, nu);
    adjoint = std::max(adjoint, std::abs(x_pairing(au, pd)) /
                                    (std::sqrt(pair_inner_l2(au, au)) * phi_norm));
  }
  CheckResult c = named("projector_algebra", "P^2 = P, P Theta = 0, <P U, Phi0> = 0, <A U, Phi0> = 0");
  c.value = std::max({idem, kill, ortho, adjoint});
  c.threshold = 1e-7;
  c.passed = c.value <= 1e-7;
  std::ostringstream os;
  os << "idempotent=" << idem << " kernel=" << kill << " range=" << ortho
     << " adjoint_null=" << adjoint << " nu=" << nu;
  c.detail = os.str();
  return c;
}

CheckResult check_resolvent(const WallProfile& p, const DenseSymmetricOperator& op, double nu,
                            std::uint64_t seed) {
  const GridPtr& g = p.theta.grid();
  const ResolventSolver solver(op, p.dtheta, nu);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.0, 3.0), im(-5.0, 5.0);
  double min_slack = std::numeric_limits<double>::infinity();
  double max_res = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    double a = re(rng);
    while (a == 0.0) a = re(rng);
    const cplx lambda(a, im(rng));
    const Field f = orthogonal_to(random_compact_field(g, seed * 101 + 2 * k), p.dtheta);
    const Field gg = orthogonal_to(random_compact_field(g, seed * 101 + 2 * k + 1), p.dtheta);
    const ResolventReport r = solver.solve(lambda, f, gg);
    min_slack = std::min(min_slack, (r.rhs - r.lhs) / r.rhs);
    max_res = std::max(max_res, r.residual);
  }
  CheckResult c = named("resolvent_inequality",
                "|conj(l) a[u,u] + (l + nu)||v||^2| <= ||U||_2 ||F||_2 on 20 random samples");
  c.value = min_slack;
  c.threshold = 0.0;
  c.passed = min_slack >= 0.0;
  std::ostringstream os;
  os << "min relative slack=" << min_slack << " max solve residual=" << max_res << " nu=" << nu;
  c.detail = os.str();
  return c;
}

CheckResult check_essential_curve(const std::vector<double>& xi) {
  double worst_bound = -std::numeric_limits<double>::infinity();
  for (double nu : {0.5, 1.0, 2.0, 3.0}) {
    const double bound = essential_spectrum_bound(nu);
    for (const auto& z : essential_curve(nu, xi)) worst_bound = std::max(worst_bound, z.real() - bound);
  }
  const auto touch = essential_curve(2.0, {0.0});
  const bool double_root = touch.size() == 2 && touch[0] == cplx(-1.0, 0.0) && touch[1] == cplx(-1.0, 0.0);
  bool flat = true;
  for (const auto& z : essential_curve(1.0, xi)) flat = flat && z.real() == -0.5;
  CheckResult c = named("essential_curve",
                "nu = 2 double root at -1, nu = 1 samples on Re = -1/2, all samples within the bound");
  c.value = worst_bound;
  c.threshold = 0.0;
  // Roots on the bound itself (nu >= 2, xi = 0) are computed to rounding error.
  c.passed = double_root && flat && worst_bound <= 4.0 * std::numeric_limits<double>::epsilon();
  std::ostringstream os;
  os << "double_root=" << double_root << " flat=" << flat << " max(Re - bound)=" << worst_bound;
  c.detail = os.str();
  return c;
}

}  // namespace

ExitCode exit_code_for(const Error& error) noexcept {
  switch (error.code()) {
    case ErrorCode::config_error:
    case ErrorCode::io_error:
    case ErrorCode::cfl_violation:
      return ExitCode::config_error;
    default:
      return ExitCode::numerical_failure;
  }
}

void set_compute_threads(std::size_t threads) {
  if (openblas_set_num_threads != nullptr) openblas_set_num_threads(static_cast<int>(threads));
}

std::string format_check(const CheckResult& c) {
  std::ostringstream os;
  os << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << " " << c.id << " value=" << c.value
     << " threshold=" << c.threshold;
  if (!c.detail.empty()) os << " " << c.detail;
  return os.str();
}

CommandOutcome cmd_solve_profile(const RunConfig& cfg) {
  validate(cfg);
  set_compute_threads(cfg.threads);
  CommandOutcome out;
  const fs::path dir = out_dir(cfg);
  fs::create_directories(dir);
  const SolveConfig sc = solve_config(cfg);
  Stopwatch clock;
  WallProfile profile;
  try {
    profile = solve_profile(sc);
  } catch (const NoConvergence& e) {
    write_solve_history(dir / "solve_history.csv", e.history());
    out.files.push_back(dir / "solve_history.csv");
    out.exit_code = ExitCode::numerical_failure;
    out.errors.push_back(e.what());
    update_manifest(cfg, "solve-profile", out, {{"solve", clock.seconds()}});
    throw;
  }
  const double solve_seconds = clock.seconds();
  write_profile(dir, profile, sc);
  out.files.push_back(dir / "profile.csv");
  out.files.push_back(dir / "profile.json");
  write_solve_history(dir / "solve_history.csv", profile.history);
  out.files.push_back(dir / "solve_history.csv");

  CheckResult c = named("profile_certificate",
                "residual <= 1e-8, theta(0) = 0, theta' > 0, energy non-increasing");
  const auto& inc = profile.history.increments;
  const bool monotone = std::all_of(inc.begin(), inc.end(), [](double d) { return d <= 0.0; });
  const double center = profile.theta[profile.theta.grid()->center_index()];
  c.value = profile.residual_l2;
  c.threshold = 1e-8;
  c.passed = profile.residual_l2 <= 1e-8 && center == 0.0 && profile.min_slope > 0.0 && monotone;
  std::ostringstream os;
  os << "theta(0)=" << center << " min_slope=" << profile.min_slope << " energy=" << format_number(profile.energy)
     << " iterations=" << profile.iterations << " monotone=" << monotone;
  c.detail = os.str();
  out.checks.push_back(c);
  update_manifest(cfg, "solve-profile", out, {{"solve", solve_seconds}, {"total", clock.seconds()}});
  return out;
}

CommandOutcome cmd_spectrum(const RunConfig& cfg) {
  validate(cfg);
  set_compute_threads(cfg.threads);
  CommandOutcome out;
  const fs::path dir = out_dir(cfg);
  const WallProfile profile = load_profile_artifact(cfg);
  const GridPtr& grid = profile.theta.grid();
  const std::uint64_t seed = cfg.dynamics.seed;
  std::map<std::string, double> timings;
  Stopwatch total;

  Stopwatch clock;
  const CoefficientSet coeffs = build_coefficients(profile);
  const DenseSymmetricOperator op_l = assemble(OperatorKind::L, coeffs);
  const DenseSymmetricOperator op_inf = assemble(OperatorKind::L_infinity, grid);
  timings["assemble"] = clock.seconds();
  if (cfg.spectra.matrix_dump) {
    write_matrix_dump(op_l, dir / "matrix_L.bin");
    write_matrix_dump(op_inf, dir / "matrix_L_infinity.bin");
    out.files.push_back(dir / "matrix_L.bin");
    out.files.push_back(dir / "matrix_L_infinity.bin");
  }

  clock = Stopwatch();
  SpectrumOptions opts;
  opts.want_vectors = true;
  opts.zero_mode_rel_tol = cfg.spectra.zero_mode_tol;
  const SpectrumReport rep_l = eig_dense(op_l, opts);
  opts.want_vectors = false;
  const SpectrumReport rep_inf = eig_dense(op_inf, opts);
  timings["eig"] = clock.seconds();
  clock = Stopwatch();
  const double lambda0_def = lambda0_deflated(op_l, profile.dtheta);
  timings["deflate"] = clock.seconds();
  const double alignment = zero_mode_alignment(rep_l, profile.dtheta);
  const double translation_ratio = norm_l2(apply_L(profile.dtheta, coeffs)) / norm_l2(profile.dtheta);

  auto spectrum_files = [&](const SpectrumReport& rep, const std::string& stem) {
    std::string csv = "re,im,kind\n";
    json values = json::array();
    for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
      const bool zero = rep.zero_mode_index && *rep.zero_mode_index == static_cast<std::size_t>(i);
      csv += format_number(rep.eigenvalues(i)) + ",0," + (zero ? "translation" : "discrete") + "\n";
      values.push_back(rep.eigenvalues(i));
    }
    json j = {{"operator", to_string(rep.kind)},
              {"n", rep.n},
              {"R", rep.half_width},
              {"zero_mode_count", rep.zero_mode_count},
              {"zero_mode_residual", rep.zero_mode_residual},
              {"lambda0", rep.lambda0},
              {"min_eigenvalue", rep.min_eigenvalue},
              {"max_eigenvalue", rep.max_eigenvalue},
              {"raw_symmetry_defect", rep.kind == OperatorKind::L ? op_l.raw_symmetry_defect
                                                                   : op_inf.raw_symmetry_defect},
              {"eigenvalues", values}};
    if (rep.kind == OperatorKind::L) {
      j["lambda0_deflated"] = lambda0_def;
      j["zero_mode_alignment"] = alignment;
      j["translation_residual_ratio"] = translation_ratio;
    }
    emit(out, dir / (stem + ".csv"), csv);
    emit(out, dir / (stem + ".json"), j.dump(2) + "\n");
  };
  spectrum_files(rep_l, "spectrum_L");
  spectrum_files(rep_inf, "spectrum_L_infinity");

  const std::vector<double> xi = xi_grid(cfg.spectra.xi_max, cfg.spectra.xi_samples);
  CompanionOptions copts;
  copts.throw_on_gap_violation = false;
  copts.xi_max = cfg.spectra.xi_max;
  copts.xi_samples = cfg.spectra.xi_samples;
  std::string gap_csv =
      "nu,lambda0,zeta0,point_bound,essential_bound,max_nonzero_real_part,mismatch,flagged,gap_ok,"
      "translation_zero_error,translation_minus_nu_error\n";
  json zeta_table = json::array();
  bool block_ok = true;
  double worst_mismatch = 0.0;
  std::ostringstream block_detail;
  clock = Stopwatch();
  for (double nu : cfg.spectra.nu_list) {
    const std::string label = nu_label(nu);
    const double zeta0 = zeta0_formula(nu, rep_l.lambda0);
    json row = {{"nu", nu},
                {"lambda0", rep_l.lambda0},
                {"zeta0", zeta0},
                {"point_bound", point_spectrum_bound(nu, rep_l.lambda0)},
                {"essential_bound", essential_spectrum_bound(nu)}};
    std::string ess = "xi,re,im,branch\n";
    const auto curve = essential_curve(nu, xi);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      for (std::size_t b = 0; b < 2; ++b) {
        const cplx z = curve[2 * i + b];
        ess += format_number(xi[i]) + "," + format_number(z.real()) + "," + format_number(z.imag()) +
               "," + std::to_string(b) + "\n";
      }
    }
    emit(out, dir / ("essential_nu_" + label + ".csv"), ess);
    if (cfg.spectra.companion) {
      const BlockSpectrumReport b = companion_spectrum(op_l, nu, rep_l, copts);
      std::string csv = "re,im,kind\n" + complex_csv(b.block_eigenvalues, "companion") +
                        complex_csv(b.mapped_eigenvalues, "mapped");
      emit(out, dir / ("block_nu_" + label + ".csv"), csv);
      json bj = {{"nu", nu},
                 {"lambda0", b.lambda0},
                 {"zeta0", b.zeta0},
                 {"max_nonzero_real_part", b.max_nonzero_real_part},
                 {"mismatch", b.mismatch},
                 {"mismatch_flag", b.mismatch_flag},
                 {"translation_zero_error", b.translation_zero_error},
                 {"translation_minus_nu_error", b.translation_minus_nu_error},
                 {"gap_ok", b.gap_ok},
                 {"parity_leak", b.parity_leak},
                 {"companion_eigenvalues", complex_json(b.block_eigenvalues)},
                 {"mapped_eigenvalues", complex_json(b.mapped_eigenvalues)}};
      emit(out, dir / ("block_nu_" + label + ".json"), bj.dump(2) + "\n");
      row["max_nonzero_real_part"] = b.max_nonzero_real_part;
      row["mismatch"] = b.mismatch;
      row["flagged"] = b.mismatch_flag;
      row["gap_ok"] = b.gap_ok;
      row["translation_zero_error"] = b.translation_zero_error;
      row["translation_minus_nu_error"] = b.translation_minus_nu_error;
      const bool pair_ok = b.translation_zero_error <= copts.match_tol &&
                           b.translation_minus_nu_error <= copts.match_tol;
      block_ok = block_ok && !b.mismatch_flag && b.gap_ok && pair_ok;
      worst_mismatch = std::max(worst_mismatch, b.mismatch);
      block_detail << " nu=" << label << ":maxRe+zeta0=" << b.max_nonzero_real_part + b.zeta0
                   << ",pair=" << std::max(b.translation_zero_error, b.translation_minus_nu_error);
    } else {
      // Root map only: the mapped spectrum of L.
      std::vector<cplx> mapped;
      double max_re = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rep_l.eigenvalues.size(); ++i) {
        const auto [r1, r2] = quadratic_roots(rep_l.eigenvalues(i), nu);
        mapped.push_back(r1);
        mapped.push_back(r2);
        if (!(rep_l.zero_mode_index && *rep_l.zero_mode_index == static_cast<std::size_t>(i))) {
          max_re = std::max(max_re, r1.real());
        }
      }
      emit(out, dir / ("block_nu_" + label + ".csv"), "re,im,kind\n" + complex_csv(mapped, "mapped"));
      row["max_nonzero_real_part"] = max_re;
      row["mismatch"] = nullptr;
      row["flagged"] = false;
      row["gap_ok"] = max_re <= -zeta0 + copts.gap_tol;
      row["translation_zero_error"] = nullptr;
      row["translation_minus_nu_error"] = nullptr;
    }
    auto cell = [](const json& v) {
      if (v.is_null()) return std::string();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "1" : "0");
      return format_number(v.get<double>());
    };
    gap_csv += format_number(nu) + "," + cell(row["lambda0"]) + "," + cell(row["zeta0"]) + "," +
               cell(row["point_bound"]) + "," + cell(row["essential_bound"]) + "," +
               cell(row["max_nonzero_real_part"]) + "," + cell(row["mismatch"]) + "," +
               cell(row["flagged"]) + "," + cell(row["gap_ok"]) + "," +
               cell(row["translation_zero_error"]) + "," + cell(row["translation_minus_nu_error"]) + "\n";
    zeta_table.push_back(row);
  }
  timings["companion"] = clock.seconds();
  emit(out, dir / "gap_summary.csv", gap_csv);

  std::vector<CheckResult>& checks = out.checks;
  checks.push_back(check_translation_mode(profile, rep_l, alignment, translation_ratio));

  CheckResult gap = named("spectral_gap", "Lambda0 > 0 and stable within 1% under (n, R) -> (2n, 1.5R)");
  gap.threshold = 0.01;
  if (cfg.spectra.refine) {
    clock = Stopwatch();
    RunConfig fine = cfg;
    fine.grid.n = 2 * cfg.grid.n;
    fine.grid.half_width = 1.5 * cfg.grid.half_width;
    const WallProfile pf = solve_profile(solve_config(fine));
    const DenseSymmetricOperator opf = assemble(OperatorKind::L, build_coefficients(pf));
    SpectrumOptions fo;
    fo.zero_mode_rel_tol = cfg.spectra.zero_mode_tol;
    const SpectrumReport rf = eig_dense(opf, fo);
    timings["refine"] = clock.seconds();
    gap.value = std::abs(rf.lambda0 - rep_l.lambda0) / rep_l.lambda0;
    gap.passed = rep_l.lambda0 > 0.0 && gap.value <= 0.01;
    std::ostringstream os;
    os << "Lambda0=" << format_number(rep_l.lambda0) << " refined=" << format_number(rf.lambda0)
       << " deflated=" << format_number(lambda0_def);
    gap.detail = os.str();
  } else {
    gap.skipped = true;
    gap.value = std::nan("");
    gap.detail = "refinement disabled (spectra.refine = false); Lambda0=" + format_number(rep_l.lambda0);
  }
  checks.push_back(gap);

  CheckResult linf = named("asymptotic_operator", "min eigenvalue of L_inf within 1e-3 of 1");
  linf.value = std::abs(rep_inf.min_eigenvalue - 1.0);
  linf.threshold = 1e-3;
  linf.passed = linf.value <= 1e-3;
  linf.detail = "min_eig=" + format_number(rep_inf.min_eigenvalue);
  checks.push_back(linf);

  clock = Stopwatch();
  checks.push_back(check_operator_identities(profile, coeffs, op_l, seed));

  CheckResult blk = named("block_spectrum",
                  "companion = root map to 1e-7, Re <= -zeta0 + 1e-8, translation pair {0, -nu}");
  blk.threshold = 1e-7;
  if (cfg.spectra.companion) {
    blk.value = worst_mismatch;
    blk.passed = block_ok;
    blk.detail = block_detail.str();
  } else {
    blk.skipped = true;
    blk.value = std::nan("");
    blk.detail = "companion solve disabled (spectra.companion = false)";
  }
  checks.push_back(blk);
  checks.push_back(check_essential_curve(xi));
  checks.push_back(check_hessian(profile, coeffs, lambda0_def, seed));
  checks.push_back(check_projector(profile, coeffs, cfg.dynamics.nu, seed));
  checks.push_back(check_resolvent(profile, op_l, cfg.dynamics.nu, seed));
  timings["checks"] = clock.seconds();
  timings["total"] = total.seconds();

  json summary = {{"n", grid->size()},
                  {"R", grid->half_width()},
                  {"lambda0", rep_l.lambda0},
                  {"lambda0_deflated", lambda0_def},
                  {"zero_mode_count", rep_l.zero_mode_count},
                  {"zero_mode_alignment", alignment},
                  {"l_infinity_min_eigenvalue", rep_inf.min_eigenvalue},
                  {"zeta0_table", zeta_table},
                  {"checks", checks_json(checks)}};
  emit(out, dir / "spectrum_summary.json", summary.dump(2) + "\n");
  update_manifest(cfg, "spectrum", out, timings);
  return out;
}

CommandOutcome cmd_evolve(const RunConfig& cfg) {
  validate(cfg);
  set_compute_threads(cfg.threads);
  CommandOutcome out;
  const fs::path dir = out_dir(cfg);
  const WallProfile profile = load_profile_artifact(cfg);
  const GridPtr& grid = profile.theta.grid();
  const DynamicsConfig& d = cfg.dynamics;
  EvolveConfig ec = evolve_config(cfg);
  validate(ec, *grid);
  std::map<std::string, double> timings;
  Stopwatch total;

  Stopwatch clock;
  const CoefficientSet coeffs = build_coefficients(profile);
  SpectrumOptions so;
  so.zero_mode_rel_tol = cfg.spectra.zero_mode_tol;
  const SpectrumReport rep = eig_dense(assemble(OperatorKind::L, coeffs), so);
  const double prediction = linear_decay_prediction(rep, d.nu);
  timings["spectrum"] = clock.seconds();

  const Field shape = perturbation_shape(parse_shape(d.shape), profile, d.seed);
  const Field pert = d.amplitude * shape;
  const ProjectorData pd = build_projector(profile, d.nu);

  auto run = [&](const PairState& initial, const EvolveConfig& c, const fs::path& trace_path) {
    try {
      EvolveResult r = evolve(initial, profile, c);
      write_trace_csv(trace_path, r.trace);
      out.files.push_back(trace_path);
      return r;
    } catch (const BlowUp& e) {
      write_trace_csv(trace_path, e.partial_trace());
      out.files.push_back(trace_path);
      out.exit_code = ExitCode::numerical_failure;
      out.errors.push_back(e.what());
      update_manifest(cfg, "evolve", out, {{"total", total.seconds()}});
      throw;
    }
  };
  auto fit_json = [&](const std::vector<TraceRecord>& trace, const DecayFit& f) {
    return json{{"omega", f.omega},
                {"amplitude", f.amplitude},
                {"window", {f.t_start, f.t_end}},
                {"r_squared", f.r_squared},
                {"points", f.points},
                {"ratio_to_prediction", f.omega / prediction},
                {"final_h1_distance", trace.back().h1_distance},
                {"final_shift", trace.back().shift}};
  };

  // Linearized run on Phi0-orthogonal data.
  clock = Stopwatch();
  const PairState lin0 = project({pert, Field::zeros(grid), StateMode::perturbation}, pd);
  const bool full = d.mode == "full";
  const EvolveResult lin = run(lin0, ec, dir / (full ? "trace_linear.csv" : "trace.csv"));
  const DecayFit lin_fit = decay_fit(lin.trace);
  timings["linear"] = clock.seconds();

  json fit = {{"mode", d.mode},       {"nu", d.nu},       {"dt", d.dt},
              {"T", d.T},             {"amplitude", d.amplitude}, {"shape", d.shape},
              {"seed", d.seed},       {"prediction", prediction},
              {"linear", fit_json(lin.trace, lin_fit)}};
  fit["linear"]["band"] = {0.8, 1.2};

  CheckResult lc = named("linear_decay", "linearized decay rate within [0.8, 1.2] x prediction, r^2 >= 0.99");
  lc.value = lin_fit.omega / prediction;
  lc.threshold = 0.8;
  lc.passed = lc.value >= 0.8 && lc.value <= 1.2 && lin_fit.r_squared >= 0.99;
  {
    std::ostringstream os;
    os << "omega=" << lin_fit.omega << " prediction=" << prediction << " r2=" << lin_fit.r_squared;
    lc.detail = os.str();
  }

  CheckResult oc = named("orbital_stability",
                 "nonlinear decay within [0.7, 1.3] x prediction, shift settles, energy identity");
  if (full) {
    clock = Stopwatch();
    const PairState s0{profile.theta + pert, Field::zeros(grid), StateMode::full_phase};
    const EvolveResult res = run(s0, ec, dir / "trace.csv");
    EvolveConfig half = ec;
    half.dt = ec.dt / 2.0;
    half.every = 2 * ec.every;
    const EvolveResult res_half = run(s0, half, dir / "trace_half_dt.csv");
    timings["nonlinear"] = clock.seconds();
    const DecayFit f = decay_fit(res.trace);
    const double drift = energy_drift(res.trace);
    const double drift_half = energy_drift(res_half.trace);
    const double reduction = drift_half > 0.0 ? drift / drift_half : std::numeric_limits<double>::infinity();
    const double late = late_shift_increment(res.trace);
    fit["nonlinear"] = fit_json(res.trace, f);
    fit["nonlinear"]["band"] = {0.7, 1.3};
    fit["nonlinear"]["energy_drift"] = drift;
    fit["nonlinear"]["energy_drift_half_dt"] = drift_half;
    fit["nonlinear"]["drift_reduction"] = reduction;
    fit["nonlinear"]["late_shift_increment"] = late;
    const double ratio = f.omega / prediction;
    oc.value = ratio;
    oc.threshold = 0.7;
    oc.passed = ratio >= 0.7 && ratio <= 1.3 && late <= 1e-6 && drift <= 1e-6 && reduction >= 8.0;
    std::ostringstream os;
    os << "omega=" << f.omega << " r2=" << f.r_squared << " shift=" << res.trace.back().shift
       << " late_increment=" << late << " drift=" << drift << " drift_reduction=" << reduction;
    oc.detail = os.str();
  } else {
    oc.skipped = true;
    oc.value = std::nan("");
    oc.detail = "dynamics.mode = linear";
  }
  emit(out, dir / "fit.json", fit.dump(2) + "\n");

  clock = Stopwatch();
  const std::vector<double> deltas{1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5};
  const H2Report h2 = hypothesis_H2_check(profile, deltas);
  std::vector<Field> directions;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Field u = random_compact_field(grid, d.seed * 977 + k);
    directions.push_back((1.0 / norm_h1(u)) * u);
  }
  const std::vector<double> amplitudes{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  const H3Report h3 = hypothesis_H3_check(profile, directions, amplitudes);
  timings["hypotheses"] = clock.seconds();
  json hyp = {{"translate_family",
               {{"deltas", h2.deltas},
                {"defects", h2.defects},
                {"ratios", h2.ratios},
                {"max_ratio", h2.max_ratio},
                {"constant", h2.constant},
                {"variation", h2.variation}}},
              {"nonlinear_remainder",
               {{"amplitudes", h3.amplitudes},
                {"norms", h3.norms},
                {"slopes", h3.slopes},
                {"min_slope", h3.min_slope}}}};
  emit(out, dir / "hypotheses.json", hyp.dump(2) + "\n");

  CheckResult hc = named("nonlinear_remainder",
                 "remainder slope >= 1.9 on 10 directions, translate defect ratio <= 1.1 x constant");
  hc.value = h3.min_slope;
  hc.threshold = 1.9;
  hc.passed = h3.min_slope >= 1.9 && h2.max_ratio <= 1.1 * h2.constant;
  {
    std::ostringstream os;
    os << "translate max_ratio=" << h2.max_ratio << " constant=" << h2.constant
       << " variation=" << h2.variation;
    hc.detail = os.str();
  }
  out.checks = {hc, lc, oc};
  fit["checks"] = checks_json(out.checks);
  write_text(dir / "fit.json", fit.dump(2) + "\n");
  timings["total"] = total.seconds();
  update_manifest(cfg, "evolve", out, timings);
  return out;
}

CommandOutcome cmd_report(const RunConfig& cfg) {
  validate(cfg);
  CommandOutcome out;
  const fs::path dir = out_dir(cfg);
  Stopwatch clock;
  std::vector<CheckResult> checks;
  json zeta_table = json::array();

  auto load = [&](const std::string& name, const std::string& producer) -> std::optional<json> {
    const fs::path p = dir / name;
    if (!fs::exists(p)) {
      out.errors.push_back("missing " + name + " (run '" + producer + "')");
      return std::nullopt;
    }
    try {
      return json::parse(read_text(p));
    } catch (const json::exception& e) {
      out.errors.push_back("unreadable " + name + ": " + e.what());
      return std::nullopt;
    }
  };

  if (auto side = load("profile.json", "solve-profile")) {
    CheckResult c = named("profile_certificate",
                  "residual <= 1e-8, theta(0) = 0, theta' > 0, energy non-increasing");
    c.value = side->value("residual_l2", std::nan(""));
    c.threshold = 1e-8;
    c.passed = c.value <= 1e-8 && side->value("theta_center", 1.0) == 0.0 &&
               side->value("min_slope", 0.0) > 0.0 && side->value("energy_nonincreasing", false);
    std::ostringstream os;
    os << "energy=" << side->value("energy", 0.0) << " min_slope=" << side->value("min_slope", 0.0);
    c.detail = os.str();
    checks.push_back(c);
  }
  if (auto spec = load("spectrum_summary.json", "spectrum")) {
    for (const auto& j : (*spec)["checks"]) checks.push_back(check_from_json(j));
    zeta_table = (*spec)["zeta0_table"];
  }
  if (auto fit = load("fit.json", "evolve")) {
    for (const auto& j : (*fit)["checks"]) checks.push_back(check_from_json(j));
  }

  const std::vector<std::string> order{
      "profile_certificate", "translation_mode",    "spectral_gap",         "asymptotic_operator",
      "operator_identities", "block_spectrum",      "essential_curve",      "hessian_positivity",
      "projector_algebra",   "resolvent_inequality", "nonlinear_remainder", "linear_decay",
      "orbital_stability"};
  std::vector<CheckResult> ordered;
  for (const auto& id : order) {
    auto it = std::find_if(checks.begin(), checks.end(), [&](const CheckResult& c) { return c.id == id; });
    if (it != checks.end()) {
      ordered.push_back(*it);
    } else {
      CheckResult miss = named(id, "no artifact");
      miss.skipped = true;
      miss.value = miss.threshold = std::nan("");
      ordered.push_back(miss);
    }
  }

  // Plot-ready data.
  std::string scatter = "nu,re,im,kind\n";
  std::string curve = "nu,xi,re,im,branch\n";
  for (double nu : cfg.spectra.nu_list) {
    const std::string label = nu_label(nu);
    const fs::path block = dir / ("block_nu_" + label + ".csv");
    const fs::path ess = dir / ("essential_nu_" + label + ".csv");
    if (!fs::exists(block) || !fs::exists(ess)) {
      out.errors.push_back("missing spectrum artifacts for nu=" + label + " (run 'spectrum')");
      continue;
    }
    for (auto [path, text] : {std::pair{block, &scatter}, std::pair{ess, &curve}}) {
      std::istringstream in(read_text(path));
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (!line.empty()) *text += format_number(nu) + "," + line + "\n";
      }
    }
  }
  emit(out, dir / "spectrum_scatter.csv", scatter);
  emit(out, dir / "essential_curve.csv", curve);
  if (fs::exists(dir / "trace.csv")) {
    const auto trace = read_trace_csv(dir / "trace.csv");
    std::string decay = "t,h1_distance,log_h1_distance,fit_log\n";
    DecayFit f{};
    bool have_fit = false;
    try {
      f = decay_fit(trace);
      have_fit = true;
    } catch (const Error&) {
      out.errors.push_back("decay fit failed on trace.csv");
    }
    for (const auto& r : trace) {
      const double fit_log = have_fit ? std::log(f.amplitude) - f.omega * r.t : std::nan("");
      decay += format_number(r.t) + "," + format_number(r.h1_distance) + "," +
               format_number(std::log(r.h1_distance)) + "," + format_number(fit_log) + "\n";
    }
    emit(out, dir / "decay_log.csv", decay);
  } else {
    out.errors.push_back("missing trace.csv (run 'evolve')");
  }

  const bool all_passed =
      out.errors.empty() &&
      std::all_of(ordered.begin(), ordered.end(), [](const CheckResult& c) { return c.passed && !c.skipped; });
  json report = {{"all_passed", all_passed},
                 {"checks", checks_json(ordered)},
                 {"errors", out.errors},
                 {"zeta0_table", zeta_table}};
  emit(out, dir / "report.json", report.dump(2) + "\n");

  std::ostringstream txt;
  txt << "neelwall report: " << (all_passed ? "all checks passed" : "NOT all checks passed") << "\n\n";
  for (const auto& c : ordered) txt << format_check(c) << "\n";
  txt << "\nzeta0 over nu_list\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%8s %14s %14s %16s\n", "nu", "zeta0", "lambda0", "max Re (nonzero)");
  txt << buf;
  for (const auto& row : zeta_table) {
    const json& mr = row["max_nonzero_real_part"];
    std::snprintf(buf, sizeof buf, "%8g %14.10f %14.10f %16.10f\n", row["nu"].get<double>(),
                  row["zeta0"].get<double>(), row["lambda0"].get<double>(),
                  mr.is_number() ? mr.get<double>() : std::nan(""));
    txt << buf;
  }
  if (!out.errors.empty()) {
    txt << "\nerrors\n";
    for (const auto& e : out.errors) txt << "  " << e << "\n";
  }
  emit(out, dir / "report.txt", txt.str());
  out.checks = ordered;
  out.exit_code = all_passed ? ExitCode::success : ExitCode::acceptance_failure;
  update_manifest(cfg, "report", out, {{"total", clock.seconds()}});
  return out;
}

}  // namespace neel

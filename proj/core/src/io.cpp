#include "neelwall/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace neel {
namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& msg) {
  throw Error(ErrorCode::config_error, msg);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) config_fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) config_fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_key(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(where + "." + key + ": " + e.what());
  }
}

void read_count(const json& obj, const char* key, std::size_t& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_fail(where + "." + key + " must be a nonnegative integer");
  }
  out = v.get<std::size_t>();
}

json to_json(const RunConfig& c) {
  return json{
      {"grid", {{"n", c.grid.n}, {"half_width", c.grid.half_width}, {"pad_factor", c.grid.pad_factor}}},
      {"profile", {{"tol_residual", c.profile.tol_residual}, {"max_iters", c.profile.max_iters}}},
      {"spectra",
       {{"nu_list", c.spectra.nu_list},
        {"zero_mode_tol", c.spectra.zero_mode_tol},
        {"xi_max", c.spectra.xi_max},
        {"xi_samples", c.spectra.xi_samples},
        {"companion", c.spectra.companion},
        {"matrix_dump", c.spectra.matrix_dump},
        {"refine", c.spectra.refine}}},
      {"dynamics",
       {{"nu", c.dynamics.nu},
        {"dt", c.dynamics.dt},
        {"T", c.dynamics.T},
        {"every", c.dynamics.every},
        {"amplitude", c.dynamics.amplitude},
        {"shape", c.dynamics.shape},
        {"seed", c.dynamics.seed},
        {"mode", c.dynamics.mode},
        {"c_cfl", c.dynamics.c_cfl}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
      {"threads", c.threads}};
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  reject_unknown(doc, {"grid", "profile", "spectra", "dynamics", "output", "threads"}, "config");
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    reject_unknown(g, {"n", "half_width", "pad_factor"}, "grid");
    read_count(g, "n", c.grid.n, "grid");
    read_key(g, "half_width", c.grid.half_width, "grid");
    read_count(g, "pad_factor", c.grid.pad_factor, "grid");
  }
  if (doc.contains("profile")) {
    const json& p = doc["profile"];
    reject_unknown(p, {"tol_residual", "max_iters"}, "profile");
    read_key(p, "tol_residual", c.profile.tol_residual, "profile");
    read_count(p, "max_iters", c.profile.max_iters, "profile");
  }
  if (doc.contains("spectra")) {
    const json& s = doc["spectra"];
    reject_unknown(s, {"nu_list", "zero_mode_tol", "xi_max", "xi_samples", "companion", "matrix_dump",
                       "refine"},
                   "spectra");
    read_key(s, "nu_list", c.spectra.nu_list, "spectra");
    read_key(s, "zero_mode_tol", c.spectra.zero_mode_tol, "spectra");
    read_key(s, "xi_max", c.spectra.xi_max, "spectra");
    read_count(s, "xi_samples", c.spectra.xi_samples, "spectra");
    read_key(s, "companion", c.spectra.companion, "spectra");
    read_key(s, "matrix_dump", c.spectra.matrix_dump, "spectra");
    read_key(s, "refine", c.spectra.refine, "spectra");
  }
  if (doc.contains("dynamics")) {
    const json& d = doc["dynamics"];
    reject_unknown(d, {"nu", "dt", "T", "every", "amplitude", "shape", "seed", "mode", "c_cfl"},
                   "dynamics");
    read_key(d, "nu", c.dynamics.nu, "dynamics");
    read_key(d, "dt", c.dynamics.dt, "dynamics");
    read_key(d, "T", c.dynamics.T, "dynamics");
    read_count(d, "every", c.dynamics.every, "dynamics");
    read_key(d, "amplitude", c.dynamics.amplitude, "dynamics");
    read_key(d, "shape", c.dynamics.shape, "dynamics");
    read_key(d, "seed", c.dynamics.seed, "dynamics");
    read_key(d, "mode", c.dynamics.mode, "dynamics");
    read_key(d, "c_cfl", c.dynamics.c_cfl, "dynamics");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, {"directory", "formats"}, "output");
    read_key(o, "directory", c.output.directory, "output");
    read_key(o, "formats", c.output.formats, "output");
  }
  read_count(doc, "threads", c.threads, "config");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

void validate(const RunConfig& c) {
  if (!is_power_of_two(c.grid.n) || c.grid.n < 16) {
    config_fail("grid.n must be a power of two >= 16, got " + std::to_string(c.grid.n));
  }
  if (!(c.grid.half_width > 0.0) || !std::isfinite(c.grid.half_width)) {
    config_fail("grid.half_width must be positive");
  }
  if (c.grid.pad_factor < 1) config_fail("grid.pad_factor must be >= 1");
  if (!(c.profile.tol_residual > 0.0)) config_fail("profile.tol_residual must be positive");
  if (c.profile.max_iters == 0) config_fail("profile.max_iters must be positive");
  if (c.spectra.nu_list.empty()) config_fail("spectra.nu_list must be nonempty");
  for (double nu : c.spectra.nu_list) {
    if (!(nu > 0.0) || !std::isfinite(nu)) config_fail("spectra.nu_list entries must be positive");
  }
  if (!(c.spectra.zero_mode_tol > 0.0)) config_fail("spectra.zero_mode_tol must be positive");
  if (!(c.spectra.xi_max > 0.0)) config_fail("spectra.xi_max must be positive");
  if (c.spectra.xi_samples < 2) config_fail("spectra.xi_samples must be >= 2");
  const DynamicsConfig& d = c.dynamics;
  if (!(d.nu > 0.0)) config_fail("dynamics.nu must be positive");
  if (!(d.dt > 0.0)) config_fail("dynamics.dt must be positive");
  if (!(d.T > 0.0)) config_fail("dynamics.T must be positive");
  if (d.every == 0) config_fail("dynamics.every must be >= 1");
  if (!(d.amplitude >= 0.0)) config_fail("dynamics.amplitude must be nonnegative");
  if (!(d.c_cfl > 0.0)) config_fail("dynamics.c_cfl must be positive");
  if (d.mode != "full" && d.mode != "linear") config_fail("dynamics.mode must be 'full' or 'linear'");
  parse_shape(d.shape);
  const double steps = d.T / d.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    config_fail("dynamics.T must be a whole multiple of dynamics.dt");
  }
  if (c.output.directory.empty()) config_fail("output.directory must be set");
  for (const auto& f : c.output.formats) {
    if (f != "csv" && f != "json") config_fail("unknown output format '" + f + "'");
  }
  if (c.threads == 0) config_fail("threads must be >= 1");
}

GridPtr make_grid(const GridConfig& cfg) {
  return make_grid(cfg.n, cfg.half_width, cfg.pad_factor);
}

SolveConfig solve_config(const RunConfig& cfg) {
  SolveConfig s;
  s.grid = make_grid(cfg.grid);
  s.tol_residual = cfg.profile.tol_residual;
  s.max_iters = cfg.profile.max_iters;
  return s;
}

EvolveConfig evolve_config(const RunConfig& cfg) {
  EvolveConfig e;
  e.nu = cfg.dynamics.nu;
  e.dt = cfg.dynamics.dt;
  e.T = cfg.dynamics.T;
  e.every = cfg.dynamics.every;
  e.c_cfl = cfg.dynamics.c_cfl;
  return e;
}

bool wants_format(const RunConfig& cfg, const std::string& format) {
  return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), format) !=
         cfg.output.formats.end();
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string nu_label(double nu) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%g", nu);
  return buf.data();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_profile(const std::filesystem::path& dir, const WallProfile& profile,
                   const SolveConfig& cfg) {
  const Grid& g = *profile.theta.grid();
  std::string csv = "x,theta,dtheta\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    csv += format_number(g.node(i)) + "," + format_number(profile.theta[i]) + "," +
           format_number(profile.dtheta[i]) + "\n";
  }
  write_text(dir / "profile.csv", csv);
  const auto& inc = profile.history.increments;
  const bool nonincreasing = std::all_of(inc.begin(), inc.end(), [](double d) { return d <= 0.0; });
  const json sidecar = {
      {"n", g.size()},
      {"R", g.half_width()},
      {"pad_factor", g.pad_factor()},
      {"energy", profile.energy},
      {"residual_l2", profile.residual_l2},
      {"min_slope", profile.min_slope},
      {"max_slope", profile.max_slope},
      {"max_curvature", profile.max_curvature},
      {"theta_center", profile.theta[g.center_index()]},
      {"energy_nonincreasing", nonincreasing},
      {"solver",
       {{"method", "bessel-preconditioned gradient descent, Armijo backtracking"},
        {"iterations", profile.iterations},
        {"tol_residual", cfg.tol_residual},
        {"max_iters", cfg.max_iters},
        {"initial_energy", profile.history.energy.empty() ? profile.energy : profile.history.energy.front()},
        {"step_rule",
         {{"initial_step", cfg.step_rule.initial_step},
          {"max_step", cfg.step_rule.max_step},
          {"grow", cfg.step_rule.grow},
          {"shrink", cfg.step_rule.shrink},
          {"armijo", cfg.step_rule.armijo}}}}}};
  write_text(dir / "profile.json", sidecar.dump(2) + "\n");
}

WallProfile read_profile(const std::filesystem::path& dir) {
  const auto side_path = dir / "profile.json";
  const auto csv_path = dir / "profile.csv";
  if (!std::filesystem::exists(side_path) || !std::filesystem::exists(csv_path)) {
    throw Error(ErrorCode::io_error, "no profile artifact in " + dir.string() +
                                         "; run 'solve-profile' with the same --out first");
  }
  json side;
  try {
    side = json::parse(read_text(side_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, "bad profile.json: " + std::string(e.what()));
  }
  const auto grid = make_grid(side.at("n").get<std::size_t>(), side.at("R").get<double>(),
                              side.value("pad_factor", std::size_t{1}));
  std::ifstream in(csv_path);
  std::string line;
  std::getline(in, line);
  std::vector<double> theta;
  theta.reserve(grid->size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw Error(ErrorCode::io_error, "malformed profile.csv row");
    }
    theta.push_back(std::stod(line.substr(a + 1, b - a - 1)));
  }
  if (theta.size() != grid->size()) {
    throw Error(ErrorCode::io_error, "profile.csv has " + std::to_string(theta.size()) +
                                         " rows, sidecar says " + std::to_string(grid->size()));
  }
  const std::size_t iterations = side.contains("solver") ? side["solver"].value("iterations", std::size_t{0}) : 0;
  return make_profile(Field(grid, std::move(theta)), iterations);
}

void write_solve_history(const std::filesystem::path& path, const SolveHistory& h) {
  std::string csv = "iteration,energy,residual,step\n";
  for (std::size_t i = 0; i < h.energy.size(); ++i) {
    const double step = i > 0 && i - 1 < h.step.size() ? h.step[i - 1] : 0.0;
    csv += std::to_string(i) + "," + format_number(h.energy[i]) + "," +
           format_number(i < h.residual.size() ? h.residual[i] : 0.0) + "," + format_number(step) +
           "\n";
  }
  write_text(path, csv);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
  std::string csv = "t,h1_distance,shift,kinetic,potential,dissipation_integral\n";
  for (const auto& r : trace) {
    csv += format_number(r.t) + "," + format_number(r.h1_distance) + "," + format_number(r.shift) +
           "," + format_number(r.kinetic) + "," + format_number(r.potential) + "," +
           format_number(r.dissipation_integral) + "\n";
  }
  write_text(path, csv);
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::array<double, 6> v{};
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::io_error, "malformed trace row");
      x = std::stod(cell);
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace neel

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neelwall/dynamics.hpp"
#include "neelwall/profile.hpp"
#include "neelwall/spectra.hpp"

namespace neel {

struct GridConfig {
  std::size_t n = 2048;
  double half_width = 60.0;
  std::size_t pad_factor = 1;
};

struct ProfileConfig {
  double tol_residual = 1e-8;
  std::size_t max_iters = 20000;
};

struct SpectraConfig {
  std::vector<double> nu_list{0.5, 1.0, 2.0, 3.0};
  double zero_mode_tol = 1e-5;
  double xi_max = 50.0;
  std::size_t xi_samples = 4096;
  /// Run the nonsymmetric companion solve (slow) in addition to the root map.
  bool companion = true;
  /// Write binary dumps of the assembled operators.
  bool matrix_dump = false;
  /// Re-solve on (2n, 1.5R) and compare the spectral gap.
  bool refine = true;
};

struct DynamicsConfig {
  double nu = 1.0;
  double dt = 0.02;
  double T = 40.0;
  std::size_t every = 5;
  double amplitude = 0.05;
  std::string shape = "even_bump";
  std::uint64_t seed = 1;
  /// "full" (nonlinear phase) or "linear" (projected linearized system).
  std::string mode = "full";
  double c_cfl = 2.5;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
  GridConfig grid;
  ProfileConfig profile;
  SpectraConfig spectra;
  DynamicsConfig dynamics;
  OutputConfig output;
  std::size_t threads = 1;
};

/// Parses a JSON document; missing keys keep their defaults, unknown keys are
/// rejected. Throws config_error.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& cfg);

/// Full validation of every section. Throws config_error.
void validate(const RunConfig& cfg);

GridPtr make_grid(const GridConfig& cfg);
SolveConfig solve_config(const RunConfig& cfg);
EvolveConfig evolve_config(const RunConfig& cfg);

bool wants_format(const RunConfig& cfg, const std::string& format);

/// "%.17g" rendering used by every CSV writer.
std::string format_number(double v);
/// Compact label for file names: 0.5 -> "0.5", 1 -> "1".
std::string nu_label(double nu);

// Profile artifacts: profile.csv (x, theta, dtheta) and profile.json.
void write_profile(const std::filesystem::path& dir, const WallProfile& profile,
                   const SolveConfig& cfg);
/// Reads profile.csv / profile.json and re-derives the profile.
WallProfile read_profile(const std::filesystem::path& dir);
void write_solve_history(const std::filesystem::path& path, const SolveHistory& history);

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories. Throws io_error.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace neel

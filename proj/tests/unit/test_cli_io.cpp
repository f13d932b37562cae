#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "neelwall/commands.hpp"
#include "neelwall/io.hpp"

using namespace neel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("neelwall_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.grid.n = 256;
  cfg.grid.half_width = 15.0;
  cfg.spectra.companion = false;
  cfg.spectra.refine = false;
  cfg.spectra.nu_list = {1.0};
  cfg.spectra.xi_samples = 65;
  cfg.output.directory = dir.string();
  return cfg;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const RunConfig cfg = config_from_json(R"({"grid": {"n": 512}, "dynamics": {"nu": 2.0, "shape": "odd_bump"}})");
  EXPECT_EQ(cfg.grid.n, 512u);
  EXPECT_EQ(cfg.grid.half_width, 60.0);
  EXPECT_EQ(cfg.dynamics.nu, 2.0);
  EXPECT_EQ(cfg.dynamics.shape, "odd_bump");
  EXPECT_NO_THROW(validate(cfg));
  const RunConfig back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto code = [](const std::string& text) {
    try {
      validate(config_from_json(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  EXPECT_EQ(code(R"({"grid": {"size": 12}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"grid": {"n": 1000}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"spectra": {"nu_list": []}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"profile": {"tol_residual": -1}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"dynamics": {"mode": "fast"}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"dynamics": {"shape": "square"}})"), ErrorCode::config_error);
  EXPECT_EQ(code(R"({"output": {"formats": ["xml"]}})"), ErrorCode::config_error);
  EXPECT_EQ(code("{not json"), ErrorCode::config_error);
}

TEST(Io, FormatsNumbers) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(nu_label(0.5), "0.5");
  EXPECT_EQ(nu_label(3.0), "3");
}

TEST(Io, Sha256KnownDigest) {
  const fs::path dir = scratch("sha");
  write_text(dir / "abc.txt", "abc");
  EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
}

TEST(Io, TraceRoundTrip) {
  const fs::path dir = scratch("trace");
  std::vector<TraceRecord> t{{0.0, 1.0, 0.5, 0.1, 2.0, 0.0}, {0.1, 0.9, 0.25, 0.2, 1.9, 1e-3}};
  write_trace_csv(dir / "trace.csv", t);
  const auto back = read_trace_csv(dir / "trace.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].dissipation_integral, 1e-3);
  EXPECT_EQ(back[1].shift, 0.25);
  fs::remove_all(dir);
}

TEST(Commands, SolveProfileIsDeterministicAndRoundTrips) {
  const fs::path dir = scratch("solve");
  RunConfig cfg = small_config(dir);
  const CommandOutcome first = cmd_solve_profile(cfg);
  EXPECT_EQ(first.exit_code, ExitCode::success);
  ASSERT_EQ(first.checks.size(), 1u);
  EXPECT_TRUE(first.checks[0].passed);
  const std::string csv = read_text(dir / "profile.csv");
  cmd_solve_profile(cfg);
  EXPECT_EQ(read_text(dir / "profile.csv"), csv);

  const auto side = nlohmann::json::parse(read_text(dir / "profile.json"));
  EXPECT_LE(side["residual_l2"].get<double>(), 1e-8);
  const WallProfile back = read_profile(dir);
  EXPECT_EQ(back.theta.size(), 256u);
  EXPECT_LE(back.residual_l2, 1e-8);

  const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
  for (const auto& [name, entry] : manifest["files"].items()) {
    EXPECT_EQ(entry["sha256"].get<std::string>(), sha256_file(dir / name)) << name;
  }
  EXPECT_TRUE(manifest["commands"].contains("solve-profile"));
  fs::remove_all(dir);
}

TEST(Commands, NoConvergenceDumpsHistory) {
  const fs::path dir = scratch("noconv");
  RunConfig cfg = small_config(dir);
  cfg.profile.max_iters = 2;
  try {
    cmd_solve_profile(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), ExitCode::numerical_failure);
  }
  EXPECT_TRUE(fs::exists(dir / "solve_history.csv"));
  fs::remove_all(dir);
}

TEST(Commands, SpectrumNeedsProfile) {
  const fs::path dir = scratch("missing");
  try {
    cmd_spectrum(small_config(dir));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), ExitCode::config_error);
    EXPECT_NE(std::string(e.what()).find("solve-profile"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Commands, ReportListsMissingInputs) {
  const fs::path dir = scratch("report");
  RunConfig cfg = small_config(dir);
  cmd_solve_profile(cfg);
  const CommandOutcome spec = cmd_spectrum(cfg);
  EXPECT_EQ(spec.exit_code, ExitCode::success);
  EXPECT_TRUE(fs::exists(dir / "gap_summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "essential_nu_1.csv"));
  const CommandOutcome rep = cmd_report(cfg);
  EXPECT_EQ(rep.exit_code, ExitCode::acceptance_failure);
  const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
  EXPECT_FALSE(report["all_passed"].get<bool>());
  bool listed = false;
  for (const auto& e : report["errors"]) listed = listed || e.get<std::string>().find("fit.json") != std::string::npos;
  EXPECT_TRUE(listed);
  EXPECT_EQ(report["zeta0_table"].size(), 1u);
  EXPECT_DOUBLE_EQ(report["zeta0_table"][0]["zeta0"].get<double>(), 0.5);
  fs::remove_all(dir);
}

TEST(Commands, EvolveRejectsCflViolationBeforeStepping) {
  const fs::path dir = scratch("cfl");
  RunConfig cfg = small_config(dir);
  cmd_solve_profile(cfg);
  cfg.dynamics.dt = 0.5;
  try {
    cmd_evolve(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cfl_violation);
  }
  EXPECT_FALSE(fs::exists(dir / "trace.csv"));
  fs::remove_all(dir);
}

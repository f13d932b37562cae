#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "neelwall/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

neel::RunConfig resolve(const Overrides& o) {
  neel::RunConfig cfg = o.config.empty() ? neel::RunConfig{} : neel::load_config(o.config);
  if (!o.out.empty()) cfg.output.directory = o.out;
  if (o.seed) cfg.dynamics.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

int run(neel::CommandOutcome (*command)(const neel::RunConfig&), const Overrides& o) {
  try {
    const neel::CommandOutcome outcome = command(resolve(o));
    for (const auto& c : outcome.checks) std::cout << neel::format_check(c) << "\n";
    for (const auto& e : outcome.errors) std::cerr << "error: " << e << "\n";
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << "\n";
    return static_cast<int>(outcome.exit_code);
  } catch (const neel::Error& e) {
    std::cerr << "neelwall: " << neel::to_string(e.code()) << ": " << e.what() << "\n";
    return static_cast<int>(neel::exit_code_for(e));
  } catch (const std::exception& e) {
    std::cerr << "neelwall: " << e.what() << "\n";
    return static_cast<int>(neel::ExitCode::numerical_failure);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neel wall profile, spectral stability and damped dynamics"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output.directory)");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { o.seed = s; },
                                            "random seed (overrides dynamics.seed)");
    sub->add_option_function<std::size_t>("--threads", [&](const std::size_t& t) { o.threads = t; },
                                          "BLAS threads")
        ->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve-profile", "compute the static wall profile");
  auto* spectrum = app.add_subcommand("spectrum", "spectra of L, L_inf and the block operator");
  auto* evolve = app.add_subcommand("evolve", "damped wave dynamics around the wall");
  auto* report = app.add_subcommand("report", "aggregate all acceptance checks");
  for (auto* sub : {solve, spectrum, evolve, report}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(neel::ExitCode::config_error);
  }

  if (*solve) return run(neel::cmd_solve_profile, o);
  if (*spectrum) return run(neel::cmd_spectrum, o);
  if (*evolve) return run(neel::cmd_evolve, o);
  return run(neel::cmd_report, o);
}

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

#include "neelwall/dynamics.hpp"
#include "neelwall/operators.hpp"
#include "neelwall/profile.hpp"
#include "neelwall/spectra.hpp"
#include "neelwall/spectral.hpp"

using namespace neel;

namespace {

// Walls are solved once per grid size and shared between benchmarks.
const WallProfile& wall(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<WallProfile>> cache;
  auto& slot = cache[n];
  if (!slot) {
    SolveConfig cfg;
    cfg.grid = make_grid(n, 60.0 * static_cast<double>(n) / 2048.0);
    slot = std::make_unique<WallProfile>(solve_profile(cfg));
  }
  return *slot;
}

void BM_HalfLaplacian(benchmark::State& state) {
  auto g = make_grid(static_cast<std::size_t>(state.range(0)), 60.0);
  Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  for (auto _ : state) benchmark::DoNotOptimize(half_laplacian(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HalfLaplacian)->RangeMultiplier(2)->Range(256, 8192)->Complexity();

void BM_EnergyGradient(benchmark::State& state) {
  const WallProfile& p = wall(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(p.theta));
}
BENCHMARK(BM_EnergyGradient)->Arg(512)->Arg(2048)->Arg(4096);

void BM_ApplyL(benchmark::State& state) {
  const WallProfile& p = wall(static_cast<std::size_t>(state.range(0)));
  const CoefficientSet c = build_coefficients(p);
  const Field u = random_compact_field(p.theta.grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_L(u, c));
}
BENCHMARK(BM_ApplyL)->Arg(512)->Arg(2048);

void BM_SolveProfile(benchmark::State& state) {
  SolveConfig cfg;
  cfg.grid = make_grid(static_cast<std::size_t>(state.range(0)), 60.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(cfg).energy);
}
BENCHMARK(BM_SolveProfile)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_AssembleL(benchmark::State& state) {
  const CoefficientSet c = build_coefficients(wall(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(OperatorKind::L, c).raw_symmetry_defect);
}
BENCHMARK(BM_AssembleL)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EigDense(benchmark::State& state) {
  const auto op = assemble(OperatorKind::L, build_coefficients(wall(static_cast<std::size_t>(state.range(0)))));
  SpectrumOptions o;
  o.want_vectors = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(eig_dense(op, o).lambda0);
}
BENCHMARK(BM_EigDense)->Args({512, 0})->Args({512, 1})->Args({1024, 0})->Unit(benchmark::kMillisecond);

void BM_CompanionBlock(benchmark::State& state) {
  const auto op = assemble(OperatorKind::L, build_coefficients(wall(static_cast<std::size_t>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(companion_eigenvalues(op.matrix, 1.0).size());
}
BENCHMARK(BM_CompanionBlock)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Rk4StepFull(benchmark::State& state) {
  const WallProfile& p = wall(static_cast<std::size_t>(state.range(0)));
  const PairState s{p.theta + 0.05 * perturbation_shape(PerturbationShape::even_bump, p),
                    Field::zeros(p.theta.grid()), StateMode::full_phase};
  const Rhs rhs = [](const PairState& x) { return rhs_full(x, 1.0); };
  const double dt_max = cfl_limit(*p.theta.grid());
  for (auto _ : state) benchmark::DoNotOptimize(step_rk4(s, 0.02, rhs, dt_max));
}
BENCHMARK(BM_Rk4StepFull)->Arg(512)->Arg(2048);

void BM_ExtractShift(benchmark::State& state) {
  const WallProfile& p = wall(2048);
  const Field moved = translate_wall(p.theta, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_shift(moved, p, state.range(0) != 0 ? std::optional(0.75) : std::nullopt));
  }
}
BENCHMARK(BM_ExtractShift)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();

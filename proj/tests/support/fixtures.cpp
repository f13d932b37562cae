#include "fixtures.hpp"

namespace fixtures {
namespace {

neel::WallProfile solve(std::size_t n, double r) {
  neel::SolveConfig cfg;
  cfg.grid = neel::make_grid(n, r);
  return neel::solve_profile(cfg);
}

}  // namespace

const neel::WallProfile& small_wall() {
  static const neel::WallProfile wall = solve(512, 30.0);
  return wall;
}

const neel::WallProfile& medium_wall() {
  static const neel::WallProfile wall = solve(1024, 40.0);
  return wall;
}

std::vector<double> to_vector(const neel::Field& f) {
  return {f.values().begin(), f.values().end()};
}

}  // namespace fixtures

#pragma once

#include <vector>

#include "neelwall/grid.hpp"
#include "neelwall/profile.hpp"

namespace fixtures {

/// Solved wall on a small grid, computed once per test binary.
const neel::WallProfile& small_wall();   // n = 512, R = 30
const neel::WallProfile& medium_wall();  // n = 1024, R = 40

std::vector<double> to_vector(const neel::Field& f);

}  // namespace fixtures

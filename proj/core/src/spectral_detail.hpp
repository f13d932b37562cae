#pragma once

#include <complex>
#include <vector>

#include "neelwall/spectral.hpp"

namespace neel::detail {

using cd = std::complex<double>;

// Frequently used symbols, tabulated once per (size, half width, twist).
enum class StdSymbol { d1, d2, one_plus_abs, bessel_inverse };

/// Wavenumbers of an n-point box of half width r in FFT bin order. For the
/// periodic twist the Nyquist bin carries +pi n / (2 r).
std::vector<double> box_wavenumbers(std::size_t n, double r, Twist twist);

/// Forward DFT of f (multiplied by e^{i kappa x} for antiperiodic fields).
std::vector<cd> forward(const Field& f, Twist twist);
/// Inverse of `forward`, real part, normalized.
Field inverse_real(const GridPtr& grid, std::vector<cd> spec, Twist twist);

/// Multiplier on the box itself, never padded. Used for the non-decaying
/// periodic part of the wall phase.
Field box_multiplier(const Field& f, const Symbol& symbol, Twist twist);
Field box_multiplier(const Field& f, StdSymbol symbol, Twist twist);

/// Standard symbol with zero padding for periodic fields when the grid asks
/// for it. No far-field check.
Field apply_std(const Field& f, StdSymbol symbol, Twist twist);

}  // namespace neel::detail

#pragma once

#include <complex>
#include <functional>
#include <string_view>
#include <vector>

#include "neelwall/field.hpp"

namespace neel {

/// Boundary convention of a field on the box.
///
/// `periodic` fields satisfy f(x + 2R) = f(x). `antiperiodic` fields satisfy
/// f(x + 2R) = -f(x); cos and sin of the wall phase are of this kind because
/// the phase advances by pi across one box length. Antiperiodic multipliers
/// act on the half-integer wavenumbers (j + 1/2) pi / R.
enum class Twist { periodic, antiperiodic };

/// Fourier symbol m(k) of a multiplier operator.
using Symbol = std::function<std::complex<double>(double)>;

/// f -> F^{-1}[ m(k) F f ]. On the periodic Nyquist bin the real part of m is
/// used, so odd symbols annihilate it and real fields stay real.
Field apply_multiplier(const Field& f, const Symbol& symbol,
                       Twist twist = Twist::periodic);

Field derivative(const Field& f, Twist twist = Twist::periodic);
Field second_derivative(const Field& f, Twist twist = Twist::periodic);

/// (-Delta)^{1/2}: symbol |k|.
Field half_laplacian(const Field& f, Twist twist = Twist::periodic);
/// 1 + (-Delta)^{1/2}: symbol 1 + |k|.
Field one_plus_half_laplacian(const Field& f, Twist twist = Twist::periodic);
/// (1 - d^2/dx^2)^{-1}: symbol 1 / (1 + k^2).
Field bessel_inverse(const Field& f, Twist twist = Twist::periodic);
/// Hilbert transform: symbol -i sgn(k).
Field hilbert_transform(const Field& f, Twist twist = Twist::periodic);
/// Spectral translate x -> f(x + delta).
Field translate(const Field& f, double delta, Twist twist = Twist::periodic);

/// Admissible wavenumbers of the grid under `twist`, in FFT bin order.
std::vector<double> wavenumbers(const Grid& grid, Twist twist);

/// Unnormalized DFT of f (after the twist modulation for antiperiodic fields).
std::vector<std::complex<double>> spectrum(const Field& f,
                                           Twist twist = Twist::periodic);

double inner_l2(const Field& f, const Field& g);
double norm_l2(const Field& f);
double inner_h1(const Field& f, const Field& g, Twist twist = Twist::periodic);
double norm_h1(const Field& f, Twist twist = Twist::periodic);

/// L2 product evaluated in frequency space (discrete Plancherel).
double plancherel_l2(const Field& f, const Field& g,
                     Twist twist = Twist::periodic);

/// b[f, g] = sum (1 + |k|) f^(k) g^(k)* with the discrete Plancherel weights.
double b_form(const Field& f, const Field& g, Twist twist = Twist::periodic);

/// Largest |f| over the outermost 1% of nodes at either end (at least one).
double far_field_excess(const Field& f);

/// Emits a far_field_violation warning when far_field_excess(f) exceeds
/// far_field_tolerance(). Returns true when the precondition holds.
bool check_far_field(const Field& f, std::string_view what);

}  // namespace neel

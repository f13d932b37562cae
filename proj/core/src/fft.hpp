#pragma once

#include <complex>
#include <vector>

namespace neel::detail {

// In-place unnormalized DFTs. forward: X_j = sum_m x_m e^{-2 pi i j m / n}.
void fft_forward(std::vector<std::complex<double>>& data);
void fft_inverse(std::vector<std::complex<double>>& data);

}  // namespace neel::detail

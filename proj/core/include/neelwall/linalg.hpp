#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace neel::linalg {

/// Name of the BLAS kernel in use after the startup check.
std::string blas_kernel();

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns; empty when not requested
};

/// Dense symmetric eigensolve (divide and conquer). Throws eigen_failure.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m, bool want_vectors);

/// Eigenvalues of a general real matrix (balanced Hessenberg QR). Throws
/// eigen_failure.
std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXd m);

/// Symmetric Hausdorff distance between two finite point sets in C.
double hausdorff(const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b);

/// Largest pairing distance of a greedy nearest-unmatched matching; infinite
/// when the sizes differ. Equals the multiset distance for well separated
/// points.
double matching_distance(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b);

}  // namespace neel::linalg

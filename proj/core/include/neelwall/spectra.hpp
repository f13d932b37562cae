#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "neelwall/linalg.hpp"
#include "neelwall/operators.hpp"
#include "neelwall/state.hpp"

namespace neel {

struct SpectrumOptions {
  bool want_vectors = false;
  /// |lambda| <= zero_mode_rel_tol * max|lambda| classifies the translation mode.
  double zero_mode_rel_tol = 1e-5;
};

struct SpectrumReport {
  OperatorKind kind = OperatorKind::L;
  std::size_t n = 0;
  double half_width = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending
  std::size_t zero_mode_count = 0;
  std::optional<std::size_t> zero_mode_index;
  /// Smallest eigenvalue other than the zero mode (kind L).
  double lambda0 = 0.0;
  /// |lambda| of the zero mode.
  double zero_mode_residual = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  Eigen::MatrixXd eigenvectors;
};

SpectrumReport eig_dense(const DenseSymmetricOperator& op,
                         const SpectrumOptions& options = {});

/// Cosine similarity between the zero-mode eigenvector and dtheta.
double zero_mode_alignment(const SpectrumReport& report, const Field& dtheta);

/// The operator compressed to the L2 complement of one direction.
struct DeflatedOperator {
  GridPtr grid;
  /// Unit (discrete l2) Householder vector mapping the direction to e_0.
  Eigen::VectorXd householder;
  /// (n-1) x (n-1) compressed matrix.
  Eigen::MatrixXd reduced;
  linalg::SymmetricEigen eigen;
};

DeflatedOperator deflate(const DenseSymmetricOperator& op,
                         const Field& direction, bool want_vectors);

/// Min Rayleigh quotient of L over {u : <u, dtheta> = 0}.
double lambda0_deflated(const DenseSymmetricOperator& op, const Field& dtheta);

/// Roots of lambda^2 + nu lambda + mu, ordered by real part (then imaginary
/// part) descending.
std::pair<std::complex<double>, std::complex<double>> quadratic_roots(
    double mu, double nu);

/// zeta_0(nu) = nu/2 - max{1_{nu>=2} sqrt(nu^2-4)/2,
///                         1_{nu>=2 sqrt(L0)} sqrt(nu^2-4 L0)/2}.
double zeta0_formula(double nu, double lambda0);

/// Point-spectrum bound -nu/2 + 1_{nu>=2 sqrt(L0)} sqrt(nu^2 - 4 L0) / 2.
double point_spectrum_bound(double nu, double lambda0);
/// Essential-spectrum bound -nu/2 + 1_{nu>=2} sqrt(nu^2 - 4) / 2.
double essential_spectrum_bound(double nu);

/// Roots of lambda^2 + nu lambda + (1 + |xi| + xi^2) for each sample, both
/// branches (2 entries per sample, in sample order).
std::vector<std::complex<double>> essential_curve(
    double nu, const std::vector<double>& xi_samples);
/// Symmetric xi grid on [-xi_max, xi_max] with `count` points.
std::vector<double> xi_grid(double xi_max, std::size_t count);

struct CompanionOptions {
  /// Split into even/odd parity blocks before the nonsymmetric solve.
  bool parity_split = true;
  bool throw_on_gap_violation = true;
  double gap_tol = 1e-8;
  double match_tol = 1e-7;
  double xi_max = 50.0;
  std::size_t xi_samples = 4096;
};

struct BlockSpectrumReport {
  double nu = 0.0;
  double lambda0 = 0.0;
  std::vector<std::complex<double>> block_eigenvalues;
  std::vector<std::complex<double>> mapped_eigenvalues;
  double zeta0 = 0.0;
  double max_nonzero_real_part = 0.0;
  /// Hausdorff distance between block and mapped spectra.
  double mismatch = 0.0;
  bool mismatch_flag = false;
  /// Distances of the nearest block eigenvalues to 0 and -nu.
  double translation_zero_error = 0.0;
  double translation_minus_nu_error = 0.0;
  bool gap_ok = false;
  /// Largest parity-coupling entry of L relative to max|L|.
  double parity_leak = 0.0;
  std::vector<std::complex<double>> essential_samples;
};

/// Eigenvalues of [[0, I], [-L, -nu I]] by a nonsymmetric solve, checked
/// against quadratic_roots applied to the spectrum in `l_report`.
BlockSpectrumReport companion_spectrum(const DenseSymmetricOperator& op_l,
                                       double nu,
                                       const SpectrumReport& l_report,
                                       const CompanionOptions& options = {});

/// Eigenvalues of a companion matrix [[0, I], [-M, -nu I]] for any dense M.
std::vector<std::complex<double>> companion_eigenvalues(
    const Eigen::MatrixXd& m, double nu);

struct ProjectorData {
  double nu = 0.0;
  /// Theta = (theta', 0).
  PairState theta_mode;
  /// nu (1 - d^2/dx^2)^{-1} theta'.
  Field phi_first;
  /// Phi_0 = (nu theta', theta').
  PairState phi0;
  /// Xi = nu ||theta'||^2.
  double xi = 0.0;
};

ProjectorData build_projector(const WallProfile& profile, double nu);
/// <U, Phi_0>_{L2}, equal to the X-pairing <U, Phi>.
double x_pairing(const PairState& u, const ProjectorData& pd);
/// P U = U - Xi^{-1} <U, Phi_0> Theta.
PairState project(const PairState& u, const ProjectorData& pd);
/// A U = (v, -L u - nu v).
PairState apply_block(const PairState& u, const CoefficientSet& coeffs,
                      double nu);

struct ResolventReport {
  std::complex<double> lambda;
  /// |conj(lambda) a[u,u] + (lambda + nu) ||v||^2|
  double lhs = 0.0;
  /// ||U||_2 ||F||_2 with ||U||_2 = ||u||_a + ||v||.
  double rhs = 0.0;
  /// ||(lambda - A_1) U - F|| / ||F|| on the complement.
  double residual = 0.0;
  /// Same residual with the uncompressed L.
  double residual_full = 0.0;
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;
};

/// Solves (lambda - A) U = F on the complement of theta' and evaluates the
/// resolvent inequality.
class ResolventSolver {
 public:
  ResolventSolver(const DenseSymmetricOperator& op_l, const Field& dtheta,
                  double nu);

  ResolventReport solve(std::complex<double> lambda, const Field& f,
                        const Field& g) const;

  double nu() const noexcept { return nu_; }

 private:
  const DenseSymmetricOperator* op_;
  DeflatedOperator deflated_;
  Eigen::VectorXd direction_;  // unit l2
  double nu_;
};

}  // namespace neel

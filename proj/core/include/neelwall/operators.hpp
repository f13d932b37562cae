#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "neelwall/field.hpp"
#include "neelwall/profile.hpp"

namespace neel {

/// Coefficients of the linearization around a wall phase.
struct CoefficientSet {
  Field theta;
  Field dtheta;
  /// sin(theta), antiperiodic.
  Field s_theta;
  /// cos(theta), antiperiodic.
  Field cos_theta;
  /// cos(theta) (1 + (-Delta)^{1/2}) cos(theta), periodic.
  Field c_theta;
};

CoefficientSet build_coefficients(const WallProfile& profile);
CoefficientSet build_coefficients(const Field& theta);

/// S u = sin(theta) (1 + (-Delta)^{1/2}) (u sin(theta)).
Field apply_S(const Field& u, const CoefficientSet& coeffs);
/// L u = -u'' + S u - c_theta u.
Field apply_L(const Field& u, const CoefficientSet& coeffs);
/// L_inf u = -u'' + (1 + (-Delta)^{1/2}) u.
Field apply_L_infinity(const Field& u);

enum class OperatorKind { L, L_infinity };

const char* to_string(OperatorKind kind) noexcept;

struct DenseSymmetricOperator {
  OperatorKind kind = OperatorKind::L;
  GridPtr grid;
  /// Symmetrized matrix (M + M^T) / 2.
  Eigen::MatrixXd matrix;
  /// max|M - M^T| / max|M| before symmetrization.
  double raw_symmetry_defect = 0.0;
};

/// Column-by-column assembly of L (needs coeffs) or L_inf.
DenseSymmetricOperator assemble(OperatorKind kind, const GridPtr& grid,
                                const CoefficientSet* coeffs = nullptr);
DenseSymmetricOperator assemble(OperatorKind kind,
                                const CoefficientSet& coeffs);

Field apply_dense(const DenseSymmetricOperator& op, const Field& u);

/// Binary dump: one JSON header line {kind, n, R, ...}, then n*n row-major
/// little-endian float64 values.
void write_matrix_dump(const DenseSymmetricOperator& op,
                       const std::filesystem::path& path);
DenseSymmetricOperator read_matrix_dump(const std::filesystem::path& path);

/// N(u) = grad E(theta_shift + u) - grad E(theta_shift) - L^shift u.
Field nonlinear_remainder(const Field& u, const CoefficientSet& shifted);
Field nonlinear_remainder(const Field& u, const WallProfile& profile,
                          double shift);

/// a[u, v] = <u', v'> + b[s u, s v] - <c u, v> for u, v orthogonal to theta'.
double a_form(const Field& u, const Field& v, const CoefficientSet& coeffs);

struct HessianCheck {
  /// <L u, u>
  double lhs = 0.0;
  /// ||u theta'||^2 + b[s u, s u]
  double rhs = 0.0;
};

HessianCheck hessian_check(const Field& u, const CoefficientSet& coeffs);

}  // namespace neel

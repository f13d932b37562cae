#include "neelwall/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neelwall/linalg.hpp"
#include "neelwall/spectral.hpp"

namespace neel {
namespace {

using cd = std::complex<double>;

Eigen::VectorXd as_vector(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(),
                                           static_cast<Eigen::Index>(f.size()));
}

// Parity-adapted basis vectors: at most two nonzero entries each.
struct BasisVector {
  std::size_t i0;
  std::size_t i1;
  double c0;
  double c1;  // zero for single-node vectors
};

std::vector<BasisVector> parity_basis(std::size_t n, bool even) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<BasisVector> out;
  if (even) {
    out.push_back({0, 0, 1.0, 0.0});
    out.push_back({n / 2, n / 2, 1.0, 0.0});
  }
  for (std::size_t i = 1; i < n / 2; ++i) {
    out.push_back({i, n - i, r, even ? r : -r});
  }
  return out;
}

Eigen::MatrixXd compress(const Eigen::MatrixXd& m,
                         const std::vector<BasisVector>& left,
                         const std::vector<BasisVector>& right) {
  const auto rows = static_cast<Eigen::Index>(left.size());
  const auto cols = static_cast<Eigen::Index>(right.size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index b = 0; b < cols; ++b) {
    const BasisVector& q = right[static_cast<std::size_t>(b)];
    for (Eigen::Index a = 0; a < rows; ++a) {
      const BasisVector& p = left[static_cast<std::size_t>(a)];
      const auto i0 = static_cast<Eigen::Index>(p.i0);
      const auto i1 = static_cast<Eigen::Index>(p.i1);
      const auto j0 = static_cast<Eigen::Index>(q.i0);
      const auto j1 = static_cast<Eigen::Index>(q.i1);
      double v = p.c0 * q.c0 * m(i0, j0);
      if (q.c1 != 0.0) v += p.c0 * q.c1 * m(i0, j1);
      if (p.c1 != 0.0) {
        v += p.c1 * q.c0 * m(i1, j0);
        if (q.c1 != 0.0) v += p.c1 * q.c1 * m(i1, j1);
      }
      out(a, b) = v;
    }
  }
  return out;
}

std::size_t nearest(const std::vector<cd>& values, cd target,
                    std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == skip) continue;
    const double d = std::abs(values[i] - target);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

}  // namespace

SpectrumReport eig_dense(const DenseSymmetricOperator& op,
                         const SpectrumOptions& options) {
  const auto eig = linalg::symmetric_eigen(op.matrix, options.want_vectors);
  SpectrumReport r;
  r.kind = op.kind;
  r.n = op.grid->size();
  r.half_width = op.grid->half_width();
  r.eigenvalues = eig.values;
  r.eigenvectors = eig.vectors;
  const Eigen::Index n = r.eigenvalues.size();
  r.min_eigenvalue = r.eigenvalues(0);
  r.max_eigenvalue = r.eigenvalues(n - 1);
  const double scale = r.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = options.zero_mode_rel_tol * scale;
  Eigen::Index closest = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r.eigenvalues(i));
    if (a <= tol) ++r.zero_mode_count;
    if (a < std::abs(r.eigenvalues(closest))) closest = i;
  }
  if (r.zero_mode_count > 0) r.zero_mode_index = static_cast<std::size_t>(closest);
  r.zero_mode_residual = std::abs(r.eigenvalues(closest));
  r.lambda0 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == closest) continue;
    r.lambda0 = std::min(r.lambda0, r.eigenvalues(i));
  }
  return r;
}

double zero_mode_alignment(const SpectrumReport& report, const Field& dtheta) {
  if (!report.zero_mode_index || report.eigenvectors.size() == 0) {
    throw Error(ErrorCode::invalid_argument,
                "zero-mode alignment needs a zero mode and eigenvectors");
  }
  const Eigen::VectorXd v =
      report.eigenvectors.col(static_cast<Eigen::Index>(*report.zero_mode_index));
  const Eigen::VectorXd w = as_vector(dtheta);
  return std::abs(v.dot(w)) / (v.norm() * w.norm());
}

DeflatedOperator deflate(const DenseSymmetricOperator& op,
                         const Field& direction, bool want_vectors) {
  const Eigen::Index n = op.matrix.rows();
  Eigen::VectorXd w = as_vector(direction);
  const double wn = w.norm();
  if (!(wn > 0.0)) throw Error(ErrorCode::invalid_argument, "zero deflation direction");
  w /= wn;
  Eigen::VectorXd v = w;
  v(0) += w(0) >= 0.0 ? 1.0 : -1.0;
  v.normalize();
  const Eigen::VectorXd u = op.matrix * v;
  const double vu = v.dot(u);
  Eigen::MatrixXd hmh = op.matrix;
  hmh.noalias() -= 2.0 * v * u.transpose();
  hmh.noalias() -= 2.0 * u * v.transpose();
  hmh.noalias() += (4.0 * vu) * v * v.transpose();
  DeflatedOperator d;
  d.grid = op.grid;
  d.householder = v;
  d.reduced = 0.5 * (hmh.bottomRightCorner(n - 1, n - 1) +
                     hmh.bottomRightCorner(n - 1, n - 1).transpose());
  d.eigen = linalg::symmetric_eigen(d.reduced, want_vectors);
  return d;
}

double lambda0_deflated(const DenseSymmetricOperator& op, const Field& dtheta) {
  if (op.kind != OperatorKind::L) {
    throw Error(ErrorCode::invalid_argument, "lambda0_deflated expects L");
  }
  return deflate(op, dtheta, false).eigen.values(0);
}

std::pair<cd, cd> quadratic_roots(double mu, double nu) {
  const double disc = nu * nu - 4.0 * mu;
  if (disc >= 0.0) {
    const double q = -0.5 * (nu + std::sqrt(disc));
    const double other = q != 0.0 ? mu / q : 0.0;
    return {cd(other, 0.0), cd(q, 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {cd(-0.5 * nu, im), cd(-0.5 * nu, -im)};
}

double essential_spectrum_bound(double nu) {
  return -0.5 * nu + (nu >= 2.0 ? 0.5 * std::sqrt(nu * nu - 4.0) : 0.0);
}

double point_spectrum_bound(double nu, double lambda0) {
  const double threshold = 2.0 * std::sqrt(lambda0);
  return -0.5 * nu +
         (nu >= threshold ? 0.5 * std::sqrt(std::max(0.0, nu * nu - 4.0 * lambda0))
                          : 0.0);
}

double zeta0_formula(double nu, double lambda0) {
  return -std::max(essential_spectrum_bound(nu), point_spectrum_bound(nu, lambda0));
}

std::vector<double> xi_grid(double xi_max, std::size_t count) {
  std::vector<double> xi(count);
  if (count == 1) {
    xi[0] = 0.0;
    return xi;
  }
  for (std::size_t i = 0; i < count; ++i) {
    xi[i] = -xi_max + 2.0 * xi_max * static_cast<double>(i) /
                          static_cast<double>(count - 1);
  }
  return xi;
}

std::vector<cd> essential_curve(double nu, const std::vector<double>& xi_samples) {
  std::vector<cd> out;
  out.reserve(2 * xi_samples.size());
  for (double xi : xi_samples) {
    const auto [a, b] = quadratic_roots(1.0 + std::abs(xi) + xi * xi, nu);
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

std::vector<cd> companion_eigenvalues(const Eigen::MatrixXd& m, double nu) {
  const Eigen::Index k = m.rows();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  c.topRightCorner(k, k).setIdentity();
  c.bottomLeftCorner(k, k) = -m;
  c.bottomRightCorner(k, k).diagonal().setConstant(-nu);
  return linalg::general_eigenvalues(std::move(c));
}

BlockSpectrumReport companion_spectrum(const DenseSymmetricOperator& op_l,
                                       double nu, const SpectrumReport& l_report,
                                       const CompanionOptions& options) {
  if (op_l.kind != OperatorKind::L) {
    throw Error(ErrorCode::invalid_argument, "companion_spectrum expects L");
  }
  if (!(nu > 0.0)) throw Error(ErrorCode::invalid_argument, "nu must be positive");
  BlockSpectrumReport r;
  r.nu = nu;
  r.lambda0 = l_report.lambda0;
  r.zeta0 = zeta0_formula(nu, r.lambda0);

  const std::size_t n = op_l.grid->size();
  if (options.parity_split) {
    const auto even = parity_basis(n, true);
    const auto odd = parity_basis(n, false);
    const double scale = op_l.matrix.cwiseAbs().maxCoeff();
    r.parity_leak = compress(op_l.matrix, odd, even).cwiseAbs().maxCoeff() / scale;
    for (const auto* basis : {&even, &odd}) {
      const auto part = companion_eigenvalues(compress(op_l.matrix, *basis, *basis), nu);
      r.block_eigenvalues.insert(r.block_eigenvalues.end(), part.begin(), part.end());
    }
  } else {
    r.block_eigenvalues = companion_eigenvalues(op_l.matrix, nu);
  }

  r.mapped_eigenvalues.reserve(2 * static_cast<std::size_t>(l_report.eigenvalues.size()));
  for (Eigen::Index i = 0; i < l_report.eigenvalues.size(); ++i) {
    const auto [a, b] = quadratic_roots(l_report.eigenvalues(i), nu);
    r.mapped_eigenvalues.push_back(a);
    r.mapped_eigenvalues.push_back(b);
  }
  r.mismatch = linalg::matching_distance(r.block_eigenvalues, r.mapped_eigenvalues);
  r.mismatch_flag = !(r.mismatch <= options.match_tol);

  const std::size_t i_zero = nearest(r.block_eigenvalues, cd(0.0, 0.0));
  const std::size_t i_nu = nearest(r.block_eigenvalues, cd(-nu, 0.0), i_zero);
  r.translation_zero_error = std::abs(r.block_eigenvalues[i_zero]);
  r.translation_minus_nu_error = std::abs(r.block_eigenvalues[i_nu] + nu);
  r.max_nonzero_real_part = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.block_eigenvalues.size(); ++i) {
    if (i == i_zero || i == i_nu) continue;
    r.max_nonzero_real_part = std::max(r.max_nonzero_real_part, r.block_eigenvalues[i].real());
  }
  r.gap_ok = r.max_nonzero_real_part <= -r.zeta0 + options.gap_tol;
  r.essential_samples = essential_curve(nu, xi_grid(options.xi_max, options.xi_samples));
  if (!r.gap_ok && options.throw_on_gap_violation) {
    throw Error(ErrorCode::gap_violation,
                "max Re lambda = " + std::to_string(r.max_nonzero_real_part) +
                    " exceeds -zeta0 = " + std::to_string(-r.zeta0));
  }
  return r;
}

ProjectorData build_projector(const WallProfile& profile, double nu) {
  if (!(nu > 0.0)) throw Error(ErrorCode::invalid_argument, "nu must be positive");
  ProjectorData pd;
  pd.nu = nu;
  const Field& d = profile.dtheta;
  pd.theta_mode = {d, Field::zeros(d.grid()), StateMode::perturbation};
  pd.phi_first = nu * bessel_inverse(d);
  pd.phi0 = {nu * d, d, StateMode::perturbation};
  pd.xi = nu * inner_l2(d, d);
  return pd;
}

double x_pairing(const PairState& u, const ProjectorData& pd) {
  return pair_inner_l2(u, pd.phi0);
}

PairState project(const PairState& u, const ProjectorData& pd) {
  require_same_grid(u.first, pd.theta_mode.first);
  require_same_grid(u.second, pd.theta_mode.first);
  const double c = x_pairing(u, pd) / pd.xi;
  PairState out = u;
  out.first -= c * pd.theta_mode.first;
  return out;
}

PairState apply_block(const PairState& u, const CoefficientSet& coeffs, double nu) {
  Field second = -apply_L(u.first, coeffs);
  second -= nu * u.second;
  return {u.second, std::move(second), u.mode};
}

ResolventSolver::ResolventSolver(const DenseSymmetricOperator& op_l,
                                 const Field& dtheta, double nu)
    : op_(&op_l), deflated_(deflate(op_l, dtheta, true)), nu_(nu) {
  direction_ = as_vector(dtheta).normalized();
}

ResolventReport ResolventSolver::solve(cd lambda, const Field& f,
                                       const Field& g) const {
  const Eigen::Index n = op_->matrix.rows();
  const double h = op_->grid->spacing();
  const Eigen::VectorXd& hv = deflated_.householder;
  const auto& basis = deflated_.eigen.vectors;
  const auto& mu = deflated_.eigen.values;

  auto to_complement = [&](Eigen::VectorXd x) {
    x -= direction_.dot(x) * direction_;
    return x;
  };
  const Eigen::VectorXd fr = to_complement(as_vector(f));
  const Eigen::VectorXd gr = to_complement(as_vector(g));

  const cd shift = lambda * (lambda + nu_);
  const Eigen::VectorXcd rhs = gr.cast<cd>() + (lambda + nu_) * fr.cast<cd>();
  // H r, dropping the component along e_0.
  Eigen::VectorXcd hr = rhs - 2.0 * hv.cast<cd>() * (hv.cast<cd>().dot(rhs));
  Eigen::VectorXcd z = basis.transpose().cast<cd>() * hr.tail(n - 1);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const cd denom = mu(i) + shift;
    if (std::abs(denom) < 1e-14 * (1.0 + std::abs(mu(i)))) {
      throw Error(ErrorCode::solve_failure, "lambda is in the discrete spectrum");
    }
    z(i) /= denom;
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  y.tail(n - 1) = basis.cast<cd>() * z;
  Eigen::VectorXcd uu = y - 2.0 * hv.cast<cd>() * (hv.cast<cd>().dot(y));
  Eigen::VectorXcd vv = lambda * uu - fr.cast<cd>();

  ResolventReport rep;
  rep.lambda = lambda;
  double a_uu = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) a_uu += mu(i) * std::norm(z(i));
  a_uu *= h;
  const double v2 = h * vv.squaredNorm();
  const double f_a = std::sqrt(std::max(0.0, h * fr.dot(op_->matrix * fr)));
  const double g_l2 = std::sqrt(h) * gr.norm();
  rep.lhs = std::abs(std::conj(lambda) * a_uu + (lambda + nu_) * v2);
  rep.rhs = (std::sqrt(std::max(0.0, a_uu)) + std::sqrt(v2)) * (f_a + g_l2);

  const Eigen::VectorXd ur = uu.real();
  const Eigen::VectorXd ui = uu.imag();
  Eigen::VectorXcd mu_full(n);
  mu_full.real() = op_->matrix * ur;
  mu_full.imag() = op_->matrix * ui;
  Eigen::VectorXcd mu_proj = mu_full - direction_.cast<cd>() * (direction_.cast<cd>().dot(mu_full));
  const Eigen::VectorXcd r1 = lambda * uu - vv - fr.cast<cd>();
  const double fnorm = std::sqrt(fr.squaredNorm() + gr.squaredNorm());
  const double scale = fnorm > 0.0 ? fnorm : 1.0;
  const Eigen::VectorXcd r2p = mu_proj + (lambda + nu_) * vv - gr.cast<cd>();
  const Eigen::VectorXcd r2f = mu_full + (lambda + nu_) * vv - gr.cast<cd>();
  rep.residual = std::sqrt(r1.squaredNorm() + r2p.squaredNorm()) / scale;
  rep.residual_full = std::sqrt(r1.squaredNorm() + r2f.squaredNorm()) / scale;
  rep.u = std::move(uu);
  rep.v = std::move(vv);
  return rep;
}

}  // namespace neel

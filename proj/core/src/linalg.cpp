#include "neelwall/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>

#include "neelwall/errors.hpp"

// OpenBLAS entry points used to override its kernel choice. Weak so any other
// BLAS links as well.
extern "C" char* gotoblas_corename(void) __attribute__((weak));
extern "C" void gotoblas_dynamic_init(void) __attribute__((weak));
extern "C" void gotoblas_dynamic_quit(void) __attribute__((weak));

namespace neel::linalg {
namespace {

// OpenBLAS 0.3.20 selects its Cooperlake/SkylakeX kernels on AVX-512 hosts;
// their level-3 paths return wrong eigenvectors and stall the nonsymmetric QR.
// The Haswell kernels are correct on the same hardware. An explicit
// OPENBLAS_CORETYPE from the user always wins.
void select_blas_kernel() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (!gotoblas_corename || !gotoblas_dynamic_init || !gotoblas_dynamic_quit) return;
    if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
    const std::string core = gotoblas_corename();
    if (core != "Cooperlake" && core != "SkylakeX") return;
    setenv("OPENBLAS_CORETYPE", "Haswell", 0);
    gotoblas_dynamic_quit();
    gotoblas_dynamic_init();
  });
}

}  // namespace

std::string blas_kernel() {
  select_blas_kernel();
  return gotoblas_corename ? std::string(gotoblas_corename()) : std::string("generic");
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m, bool want_vectors) {
  const auto n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::invalid_argument, "symmetric_eigen: matrix not square");
  }
  select_blas_kernel();
  SymmetricEigen out;
  out.values.resize(n);
  Eigen::MatrixXd a = m;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                     a.data(), n, out.values.data());
  if (info != 0) {
    throw Error(ErrorCode::eigen_failure,
                "dsyevd failed with info = " + std::to_string(info));
  }
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXd m) {
  const auto n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::invalid_argument, "general_eigenvalues: matrix not square");
  }
  if (n == 0) return {};
  select_blas_kernel();
  std::vector<double> wr(static_cast<std::size_t>(n));
  std::vector<double> wi(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, m.data(), n,
                                        wr.data(), wi.data(), nullptr, n, nullptr, n);
  if (info != 0) {
    throw Error(ErrorCode::eigen_failure,
                "dgeev failed with info = " + std::to_string(info));
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {wr[i], wi[i]};
  return out;
}

double hausdorff(const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const auto& p, const auto& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, std::norm(x - y));
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace neel::linalg

namespace neel::linalg {

double matching_distance(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::norm(x - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[arg] = 1;
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace neel::linalg

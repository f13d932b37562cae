#include "neelwall/operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "neelwall/spectral.hpp"
#include "spectral_detail.hpp"

namespace neel {
namespace {

using detail::StdSymbol;

Field b_antiperiodic(const Field& f) {
  return detail::box_multiplier(f, StdSymbol::one_plus_abs, Twist::antiperiodic);
}

Field S_raw(const Field& u, const CoefficientSet& c) {
  return c.s_theta * b_antiperiodic(u * c.s_theta);
}

Field L_raw(const Field& u, const CoefficientSet& c) {
  Field out = -detail::apply_std(u, StdSymbol::d2, Twist::periodic);
  out += S_raw(u, c);
  out -= c.c_theta * u;
  return out;
}

Field L_infinity_raw(const Field& u) {
  Field out = -detail::apply_std(u, StdSymbol::d2, Twist::periodic);
  out += detail::apply_std(u, StdSymbol::one_plus_abs, Twist::periodic);
  return out;
}

}  // namespace

CoefficientSet build_coefficients(const Field& theta) {
  check_wall_range(theta);
  CoefficientSet c;
  c.theta = theta;
  c.dtheta = wall_derivative(theta);
  c.s_theta = sin(theta);
  c.cos_theta = cos(theta);
  c.c_theta = c.cos_theta * b_antiperiodic(c.cos_theta);
  check_far_field(c.c_theta, "c_theta");
  return c;
}

CoefficientSet build_coefficients(const WallProfile& profile) {
  return build_coefficients(profile.theta);
}

Field apply_S(const Field& u, const CoefficientSet& coeffs) {
  require_same_grid(u, coeffs.theta);
  check_far_field(u, "apply_S");
  return S_raw(u, coeffs);
}

Field apply_L(const Field& u, const CoefficientSet& coeffs) {
  require_same_grid(u, coeffs.theta);
  check_far_field(u, "apply_L");
  return L_raw(u, coeffs);
}

Field apply_L_infinity(const Field& u) {
  check_far_field(u, "apply_L_infinity");
  return L_infinity_raw(u);
}

const char* to_string(OperatorKind kind) noexcept {
  return kind == OperatorKind::L ? "L" : "L_infinity";
}

DenseSymmetricOperator assemble(OperatorKind kind, const GridPtr& grid,
                                const CoefficientSet* coeffs) {
  if (kind == OperatorKind::L && coeffs == nullptr) {
    throw Error(ErrorCode::invalid_argument, "assembling L needs coefficients");
  }
  if (coeffs && !coeffs->theta.grid()->same_as(*grid)) {
    throw Error(ErrorCode::grid_mismatch, "coefficients on another grid");
  }
  const auto n = static_cast<Eigen::Index>(grid->size());
  Eigen::MatrixXd m(n, n);
  Field e = Field::zeros(grid);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    const Field col = kind == OperatorKind::L ? L_raw(e, *coeffs) : L_infinity_raw(e);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
  }
  DenseSymmetricOperator op;
  op.kind = kind;
  op.grid = grid;
  const double scale = m.cwiseAbs().maxCoeff();
  const double defect = (m - m.transpose()).cwiseAbs().maxCoeff();
  op.raw_symmetry_defect = scale > 0.0 ? defect / scale : defect;
  if (op.raw_symmetry_defect > 1e-8) {
    throw Error(ErrorCode::symmetry_defect,
                "assembled operator asymmetry " +
                    std::to_string(op.raw_symmetry_defect));
  }
  op.matrix = 0.5 * (m + m.transpose());
  return op;
}

DenseSymmetricOperator assemble(OperatorKind kind, const CoefficientSet& coeffs) {
  return assemble(kind, coeffs.theta.grid(), &coeffs);
}

Field apply_dense(const DenseSymmetricOperator& op, const Field& u) {
  if (!u.grid()->same_as(*op.grid)) {
    throw Error(ErrorCode::grid_mismatch, "dense operator on another grid");
  }
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::Map<const Eigen::VectorXd> x(u.values().data(), n);
  Eigen::VectorXd y = op.matrix * x;
  return Field(u.grid(), std::vector<double>(y.data(), y.data() + n));
}

void write_matrix_dump(const DenseSymmetricOperator& op,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  const nlohmann::json header = {
      {"kind", to_string(op.kind)},
      {"n", op.grid->size()},
      {"R", op.grid->half_width()},
      {"pad_factor", op.grid->pad_factor()},
      {"layout", "row-major float64 little-endian"},
      {"raw_symmetry_defect", op.raw_symmetry_defect}};
  out << header.dump() << '\n';
  const Eigen::Index n = op.matrix.rows();
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = op.matrix(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

DenseSymmetricOperator read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, "bad matrix header: " + std::string(e.what()));
  }
  DenseSymmetricOperator op;
  const std::string kind = header.at("kind").get<std::string>();
  op.kind = kind == "L" ? OperatorKind::L : OperatorKind::L_infinity;
  op.grid = make_grid(header.at("n").get<std::size_t>(), header.at("R").get<double>(),
                      header.value("pad_factor", std::size_t{1}));
  op.raw_symmetry_defect = header.value("raw_symmetry_defect", 0.0);
  const auto n = static_cast<Eigen::Index>(op.grid->size());
  op.matrix.resize(n, n);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw Error(ErrorCode::io_error, "truncated matrix dump");
    for (Eigen::Index j = 0; j < n; ++j) op.matrix(i, j) = row[static_cast<std::size_t>(j)];
  }
  return op;
}

Field nonlinear_remainder(const Field& u, const CoefficientSet& shifted) {
  require_same_grid(u, shifted.theta);
  const Field moved = shifted.theta + u;
  check_wall_range(moved);
  Field r = energy_gradient(moved);
  r -= energy_gradient(shifted.theta);
  r -= L_raw(u, shifted);
  return r;
}

Field nonlinear_remainder(const Field& u, const WallProfile& profile,
                          double shift) {
  const Field theta = shift == 0.0 ? profile.theta : translate_wall(profile.theta, shift);
  return nonlinear_remainder(u, build_coefficients(theta));
}

namespace {

void require_orthogonal(const Field& u, const Field& dtheta) {
  const double pairing = std::abs(inner_l2(u, dtheta));
  const double scale = norm_l2(u) * norm_l2(dtheta);
  if (pairing > 1e-8 * scale) {
    throw Error(ErrorCode::orthogonality_violation,
                "<u, theta'> = " + std::to_string(pairing) + " relative " +
                    std::to_string(scale > 0.0 ? pairing / scale : pairing));
  }
}

}  // namespace

double a_form(const Field& u, const Field& v, const CoefficientSet& coeffs) {
  require_same_grid(u, coeffs.theta);
  require_same_grid(v, coeffs.theta);
  require_orthogonal(u, coeffs.dtheta);
  require_orthogonal(v, coeffs.dtheta);
  // <u', v'> in its Fourier form sum k^2 u^ v^*, consistent with -d^2/dx^2.
  const double gradient_part =
      inner_l2(-detail::apply_std(u, StdSymbol::d2, Twist::periodic), v);
  return gradient_part +
         b_form(u * coeffs.s_theta, v * coeffs.s_theta, Twist::antiperiodic) -
         inner_l2(coeffs.c_theta * u, v);
}

HessianCheck hessian_check(const Field& u, const CoefficientSet& coeffs) {
  require_same_grid(u, coeffs.theta);
  const std::size_t c = u.grid()->center_index();
  if (u[c] != 0.0) {
    throw Error(ErrorCode::center_violation,
                "variation does not vanish at the wall center");
  }
  HessianCheck h;
  h.lhs = inner_l2(L_raw(u, coeffs), u);
  const Field w = u * coeffs.dtheta;
  const Field su = u * coeffs.s_theta;
  h.rhs = inner_l2(w, w) + b_form(su, su, Twist::antiperiodic);
  return h;
}

}  // namespace neel

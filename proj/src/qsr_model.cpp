#include "qsrdg/qsr_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsrdg {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

void require_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* what) {
  if (a.rows() != rows || a.cols() != cols)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " has shape " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
}

void require_size(const Vector& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                    std::to_string(n));
}

}  // namespace

void SupplyRate::validate() const {
  const std::size_t m = Q.rows();
  require_shape(Q, m, m, "Q");
  require_shape(S, m, m, "S");
  require_shape(R, m, m, "R");
  if (max_asymmetry(Q) > kSymmetryTolerance)
    throw Error(ErrorCode::InvalidArgument, "supply rate: Q is not symmetric");
  if (max_asymmetry(R) > kSymmetryTolerance)
    throw Error(ErrorCode::InvalidArgument, "supply rate: R is not symmetric");
}

void QsrSystem::validate(const Vector& z) const {
  if (n == 0 || m == 0 || p == 0)
    throw Error(ErrorCode::InvalidArgument, "QsrSystem: dimensions must be positive");
  if (!f || !B || !h || !D || !ell || !W || !storage.value || !storage.gradient)
    throw Error(ErrorCode::InvalidArgument, "QsrSystem: every map must be set");
  if (storage.dimension != n)
    throw Error(ErrorCode::DimensionMismatch, "QsrSystem: storage dimension differs from n");
  supply.validate();
  if (supply.dimension() != m)
    throw Error(ErrorCode::DimensionMismatch, "QsrSystem: supply dimension differs from m");
  require_size(z, n, "state");
  require_size(f(z), n, "f(z)");
  require_shape(B(z), n, m, "B(z)");
  require_size(h(z), m, "h(z)");
  require_shape(D(z), m, m, "D(z)");
  require_size(ell(z), p, "ell(z)");
  require_shape(W(z), p, m, "W(z)");
  require_size(storage.gradient(z), n, "grad H(z)");
  // Throws SingularMatrix when Q D + S is not invertible.
  solve_dense(supply.Q * D(z) + supply.S, Vector(m, 1.0));
}

double dissipation_rate(const QsrSystem& sys, const Vector& z, const Vector& u) {
  return squared_norm(sys.ell(z) + sys.W(z) * u);
}

double HillMoylanResidual::max() const noexcept { return std::max({r1, r2, r3}); }

HillMoylanResidual hill_moylan_residual(const QsrSystem& sys, const Vector& z) {
  const Vector eta = sys.storage.gradient(z);
  const Vector fz = sys.f(z);
  const Vector hz = sys.h(z);
  const Vector lz = sys.ell(z);
  const Matrix Bz = sys.B(z);
  const Matrix Dz = sys.D(z);
  const Matrix Wz = sys.W(z);
  const Matrix& Q = sys.supply.Q;
  const Matrix& S = sys.supply.S;
  const Matrix& R = sys.supply.R;

  HillMoylanResidual res;
  res.r1 = std::abs(dot(eta, fz) - dot(hz, Q * hz) + dot(lz, lz));

  Vector lhs = Bz.transpose() * eta;
  lhs *= 0.5;
  lhs -= (Q * Dz + S).transpose() * hz;
  lhs += Wz.transpose() * lz;
  res.r2 = norm(lhs);

  const Matrix cond3 = Wz.transpose() * Wz - R - Dz.transpose() * S - S.transpose() * Dz -
                       Dz.transpose() * Q * Dz;
  res.r3 = frobenius_norm(cond3);
  return res;
}

double continuous_power_balance_residual(const QsrSystem& sys, const Vector& z, const Vector& u) {
  const Vector eta = sys.storage.gradient(z);
  const double dh = dot(eta, sys.f(z) + sys.B(z) * u);
  const Vector y = sys.output(z, u);
  return std::abs(dh - supply_value(sys.supply, u, y) + dissipation_rate(sys, z, u));
}

}  // namespace qsrdg

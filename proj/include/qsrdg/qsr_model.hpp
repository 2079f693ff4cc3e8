#pragma once

#include <cstddef>
#include <functional>

#include "qsrdg/dgradients.hpp"
#include "qsrdg/numerics.hpp"

namespace qsrdg {

/// Quadratic supply rate s(u, y) = y^T Q y + 2 y^T S u + u^T R u.
struct SupplyRate {
  Matrix Q;
  Matrix S;
  Matrix R;

  std::size_t dimension() const noexcept { return Q.rows(); }
  void validate() const;
};

template <class T>
T supply_value(const SupplyRate& s, const BasicVector<T>& u, const BasicVector<T>& y) {
  const BasicVector<T> qy = s.Q.cast<T>() * y;
  const BasicVector<T> su = s.S.cast<T>() * u;
  const BasicVector<T> ru = s.R.cast<T>() * u;
  return dot(y, qy) + T(2.0) * dot(y, su) + dot(u, ru);
}

/// Input-affine system
///
///   z' = f(z) + B(z) u,   y = h(z) + D(z) u,
///
/// with storage H, supply (Q, S, R) and the factorization maps ell, W for
/// which the Hill-Moylan conditions hold. ell and W are supplied by the
/// caller and only verified here.
struct QsrSystem {
  std::size_t n = 0;  // state
  std::size_t m = 0;  // inputs = outputs
  std::size_t p = 0;  // dissipation outputs
  VectorMap f;
  MatrixMap B;
  VectorMap h;
  MatrixMap D;
  VectorMap ell;
  MatrixMap W;
  StorageFunction storage;
  SupplyRate supply;

  /// Checks dimensions of every map at `z`, and invertibility of Q D(z) + S.
  void validate(const Vector& z) const;

  Vector output(const Vector& z, const Vector& u) const { return h(z) + D(z) * u; }
};

using ControlSignal = std::function<Vector(double)>;

/// ||ell(z) + W(z) u||^2.
double dissipation_rate(const QsrSystem& sys, const Vector& z, const Vector& u);

struct HillMoylanResidual {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double max() const noexcept;
};

/// Absolute residuals of the three Hill-Moylan conditions at z; condition
/// two is checked as (Q D + S)^T h = 1/2 B^T eta + W^T ell.
HillMoylanResidual hill_moylan_residual(const QsrSystem& sys, const Vector& z);

/// |eta^T (f + B u) - s(u, y) + d(z, u)|, the continuous power balance defect.
double continuous_power_balance_residual(const QsrSystem& sys, const Vector& z, const Vector& u);

}  // namespace qsrdg

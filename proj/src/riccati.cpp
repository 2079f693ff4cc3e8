#include "qsrdg/riccati.hpp"

#include <array>
#include <cmath>
#include <string>

namespace qsrdg {

namespace {

Matrix symmetrize(const Matrix& a) {
  Matrix s = a + a.transpose();
  s *= 0.5;
  return s;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be square");
}

}  // namespace

Matrix solve_lyapunov(const Matrix& a, const Matrix& rhs) {
  require_square(a, "solve_lyapunov: A");
  const std::size_t n = a.rows();
  if (rhs.rows() != n || rhs.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov: rhs shape");
  // Row-major vec: X(i, j) -> i n + j. (A^T X)(i,j) = sum_k A(k,i) X(k,j),
  // (X A)(i,j) = sum_k X(i,k) A(k,j).
  Matrix big(n * n, n * n);
  Vector b(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      b[row] = rhs(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        big(row, k * n + j) += a(k, i);
        big(row, i * n + k) += a(k, j);
      }
    }
  const Vector x = solve_dense(std::move(big), std::move(b));
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x[i * n + j];
  return out;
}

bool is_positive_definite(const Matrix& a) {
  require_square(a, "is_positive_definite");
  const std::size_t n = a.rows();
  const Matrix s = symmetrize(a);
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return true;
}

bool is_hurwitz(const Matrix& a) {
  require_square(a, "is_hurwitz");
  Matrix minus_identity = Matrix::identity(a.rows());
  minus_identity *= -1.0;
  try {
    return is_positive_definite(solve_lyapunov(a, minus_identity));
  } catch (const Error& e) {
    // Eigenvalue pairs summing to zero make the Lyapunov operator singular.
    if (e.code() == ErrorCode::SingularMatrix) return false;
    throw;
  }
}

Matrix stabilizing_gain(const Matrix& a, const Matrix& b) {
  require_square(a, "stabilizing_gain: A");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  if (b.rows() != n) throw Error(ErrorCode::DimensionMismatch, "stabilizing_gain: B rows");

  Matrix zero(m, n);
  if (is_hurwitz(a)) return zero;

  // Bass: with A_s = -(A + s I) Hurwitz, A_s Z + Z A_s^T = -2 B B^T gives
  // K = B^T Z^{-1} stabilizing when (A, B) is controllable.
  const double scale = 1.0 + max_abs(a);
  const Matrix bbt = b * b.transpose();
  for (int k = 0; k < 12; ++k) {
    const double shift = scale * std::ldexp(1.0, k);
    Matrix as = a + shift * Matrix::identity(n);
    as *= -1.0;
    Matrix rhs = bbt;
    rhs *= -2.0;
    try {
      // solve_lyapunov solves X^T-form A^T X + X A; pass A_s^T.
      const Matrix z = symmetrize(solve_lyapunov(as.transpose(), rhs));
      Matrix k_gain(m, n);
      for (std::size_t col = 0; col < n; ++col) {
        Vector e(n);
        e[col] = 1.0;
        const Vector zinv_col = solve_dense(z, e);
        const Vector kc = b.transpose() * zinv_col;
        for (std::size_t r = 0; r < m; ++r) k_gain(r, col) = kc[r];
      }
      if (is_hurwitz(a - b * k_gain)) return k_gain;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularMatrix) throw;
    }
  }

  // Coarse scan over gain entries.
  static constexpr std::array<double, 13> kGrid = {0.0, 0.1, -0.1, 0.3, -0.3, 1.0, -1.0,
                                                   3.0, -3.0, 10.0, -10.0, 30.0, -30.0};
  const std::size_t entries = m * n;
  if (entries <= 4) {
    std::size_t total = 1;
    for (std::size_t e = 0; e < entries; ++e) total *= kGrid.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
      Matrix k_gain(m, n);
      std::size_t rest = idx;
      for (std::size_t e = 0; e < entries; ++e) {
        k_gain(e / n, e % n) = kGrid[rest % kGrid.size()];
        rest /= kGrid.size();
      }
      if (is_hurwitz(a - b * k_gain)) return k_gain;
    }
  }
  throw Error(ErrorCode::NotStabilizing, "stabilizing_gain: no stabilizing gain found");
}

double are_residual(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& p) {
  const Matrix res = a.transpose() * p + p * a - p * b * b.transpose() * p + c.transpose() * c;
  return frobenius_norm(res);
}

Matrix solve_are(const Matrix& a, const Matrix& b, const Matrix& c, const AreOptions& options) {
  require_square(a, "solve_are: A");
  const std::size_t n = a.rows();
  if (b.rows() != n || c.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "solve_are: B or C shape");

  Matrix gain = options.initial_gain ? *options.initial_gain : stabilizing_gain(a, b);
  if (gain.rows() != b.cols() || gain.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "solve_are: initial gain shape");
  if (!is_hurwitz(a - b * gain))
    throw Error(ErrorCode::NotStabilizing, "solve_are: initial gain is not stabilizing");

  const Matrix ctc = c.transpose() * c;
  Matrix p;
  double previous_change = INFINITY;
  for (int it = 0; it < options.max_iterations; ++it) {
    // (A - B K)^T P + P (A - B K) = -C^T C - K^T K
    const Matrix closed = a - b * gain;
    Matrix rhs = ctc + gain.transpose() * gain;
    rhs *= -1.0;
    Matrix next = symmetrize(solve_lyapunov(closed, rhs));
    const double change = p.rows() ? frobenius_norm(next - p) : INFINITY;
    p = std::move(next);
    gain = b.transpose() * p;
    const double scale = 1.0 + frobenius_norm(p);
    // Past the quadratic phase the update stalls at the rounding floor.
    const bool stalled = previous_change <= 1e-8 * scale && change >= 0.5 * previous_change;
    previous_change = change;
    if (change <= options.tolerance * scale || stalled) {
      if (!is_hurwitz(a - b * gain))
        throw Error(ErrorCode::NotStabilizing, "solve_are: closed loop is not Hurwitz");
      return p;
    }
  }
  throw Error(ErrorCode::AreNotConverged,
              "solve_are: no convergence after " + std::to_string(options.max_iterations) +
                  " iterations");
}

}  // namespace qsrdg

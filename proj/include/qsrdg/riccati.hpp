#pragma once

#include <optional>

#include "qsrdg/numerics.hpp"

namespace qsrdg {

/// Solves A^T X + X A = rhs by vectorization (n^2 x n^2 dense system).
Matrix solve_lyapunov(const Matrix& a, const Matrix& rhs);

/// True iff every eigenvalue of A has negative real part, decided by
/// positive definiteness of the solution of A^T X + X A = -I.
bool is_hurwitz(const Matrix& a);

/// True iff the symmetric part of `a` admits a Cholesky factorization.
bool is_positive_definite(const Matrix& a);

/// A gain K with A - B K Hurwitz: tries K = 0, then shifted-Lyapunov
/// (Bass) gains for increasing shifts, then a coarse scan over gain entries.
/// Throws NotStabilizing if nothing is found.
Matrix stabilizing_gain(const Matrix& a, const Matrix& b);

/// ||A^T P + P A - P B B^T P + C^T C||_F.
double are_residual(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& p);

struct AreOptions {
  std::optional<Matrix> initial_gain;  // must stabilize (A, B) if given
  int max_iterations = 100;
  double tolerance = 1e-13;  // relative change between Newton-Kleinman iterates; a stall at the rounding floor also stops
};

/// Stabilizing solution of A^T P + P A - P B B^T P + C^T C = 0 by
/// Newton-Kleinman iteration.
Matrix solve_are(const Matrix& a, const Matrix& b, const Matrix& c, const AreOptions& options = {});

}  // namespace qsrdg

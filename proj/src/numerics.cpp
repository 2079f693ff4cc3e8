#include "qsrdg/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace qsrdg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::NewtonDidNotConverge: return "NewtonDidNotConverge";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::AreNotConverged: return "AreNotConverged";
    case ErrorCode::NotStabilizing: return "NotStabilizing";
    case ErrorCode::UnknownExample: return "UnknownExample";
  }
  return "Unknown";
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) acc += a(r, c) * a(r, c);
  return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c)));
  return m;
}

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "max_asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r + 1; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - a(c, r)));
  return m;
}

void NewtonSettings::validate() const {
  if (max_iterations < 1)
    throw Error(ErrorCode::InvalidArgument, "NewtonSettings: max_iterations must be >= 1");
  if (!(residual_tolerance >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "NewtonSettings: residual_tolerance must be >= 0");
}

namespace {

DualVector seed(const Vector& x) {
  if (x.size() > kMaxDualDim)
    throw Error(ErrorCode::InvalidArgument,
                "automatic differentiation supports at most " + std::to_string(kMaxDualDim) +
                    " variables");
  DualVector d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = Dual::variable(x[i], i);
  return d;
}

void require_finite(const Vector& v, const char* where) {
  if (!all_finite(v))
    throw Error(ErrorCode::NonFiniteEvaluation, std::string(where) + ": non-finite evaluation");
}

// Value and Jacobian from a single dual evaluation.
std::pair<Vector, Matrix> evaluate_dual(const VectorMap& f, const Vector& x) {
  const DualVector out = f(seed(x));
  Vector value(out.size());
  Matrix jac(out.size(), x.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    value[r] = out[r].value();
    for (std::size_t c = 0; c < x.size(); ++c) jac(r, c) = out[r].partial(c);
  }
  require_finite(value, "jacobian");
  for (std::size_t r = 0; r < jac.rows(); ++r)
    for (std::size_t c = 0; c < jac.cols(); ++c)
      if (!std::isfinite(jac(r, c)))
        throw Error(ErrorCode::NonFiniteEvaluation, "jacobian: non-finite derivative");
  return {value, jac};
}

Matrix central_difference(const VectorMap& f, const Vector& x) {
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  Matrix jac;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = root_eps * (1.0 + std::abs(x[k]));
    Vector plus = x, minus = x;
    plus[k] += h;
    minus[k] -= h;
    const Vector fp = f(plus);
    const Vector fm = f(minus);
    require_finite(fp, "jacobian");
    require_finite(fm, "jacobian");
    if (k == 0) jac = Matrix(fp.size(), x.size());
    const double width = plus[k] - minus[k];
    for (std::size_t r = 0; r < fp.size(); ++r) jac(r, k) = (fp[r] - fm[r]) / width;
  }
  return jac;
}

}  // namespace

Matrix jacobian(const VectorMap& f, const Vector& x, JacobianMode mode) {
  if (mode == JacobianMode::AutomaticDual) return evaluate_dual(f, x).second;
  return central_difference(f, x);
}

NewtonResult newton_solve(const VectorMap& f, const Vector& x0, const NewtonSettings& settings) {
  settings.validate();
  NewtonResult result;
  result.solution = x0;
  for (;;) {
    Vector value;
    Matrix jac;
    if (settings.jacobian_mode == JacobianMode::AutomaticDual) {
      std::tie(value, jac) = evaluate_dual(f, result.solution);
    } else {
      value = f(result.solution);
      require_finite(value, "newton_solve");
    }
    if (value.size() != result.solution.size())
      throw Error(ErrorCode::DimensionMismatch, "newton_solve: map is not square");
    result.residual = norm(value);
    if (result.residual <= settings.residual_tolerance) {
      result.converged = true;
      return result;
    }
    if (result.iterations >= settings.max_iterations) return result;
    if (settings.jacobian_mode == JacobianMode::CentralDifference)
      jac = central_difference(f, result.solution);
    result.solution -= solve_dense(std::move(jac), std::move(value));
    ++result.iterations;
  }
}

namespace {

// Legendre nodes by Newton iteration on P_n, mapped from [-1, 1] to [0, 1].
QuadratureRule build_rule(int order) {
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = order == 1 ? x : p1;
      const double pm = order == 1 ? 1.0 : p0;
      dp = order * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = order == 1 ? x : p1;
      const double pm = order == 1 ? 1.0 : p0;
      dp = order * (x * pn - pm) / (x * x - 1.0);
    }
    // Ascending order on [0, 1].
    rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[order - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder)
    throw Error(ErrorCode::InvalidArgument,
                "gauss_legendre: order must be in 1.." + std::to_string(kMaxQuadratureOrder));
  static const std::array<QuadratureRule, kMaxQuadratureOrder> rules = [] {
    std::array<QuadratureRule, kMaxQuadratureOrder> r;
    for (int k = 1; k <= kMaxQuadratureOrder; ++k) r[k - 1] = build_rule(k);
    return r;
  }();
  return rules[order - 1];
}

}  // namespace qsrdg

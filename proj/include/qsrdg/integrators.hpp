#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qsrdg/dgradients.hpp"
#include "qsrdg/numerics.hpp"
#include "qsrdg/qsr_model.hpp"

namespace qsrdg {

/// Time nodes 0 = t_0 < t_1 < ... < t_q.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> points);

  /// t_i = i T / q.
  static TimeGrid equidistant(double final_time, std::size_t steps);

  std::size_t steps() const noexcept { return points_.empty() ? 0 : points_.size() - 1; }
  double time(std::size_t i) const { return points_.at(i); }
  double step_size(std::size_t i) const { return points_.at(i + 1) - points_.at(i); }
  double final_time() const { return points_.back(); }
  const std::vector<double>& points() const noexcept { return points_; }

 private:
  std::vector<double> points_;
};

enum class Scheme { DgQsr, ImplicitMidpoint };
enum class InputRule { Trapezoidal, MidpointSample };

struct SchemeConfig {
  Scheme scheme = Scheme::DgQsr;
  DiscreteGradientKind dg_kind = DiscreteGradientKind::gonzalez();
  NewtonSettings newton{};
  // Relative: a step from z_i aborts once ||dg|| <= gradient_floor * (1 + ||grad H(z_i)||).
  double gradient_floor = 1e-12;
  InputRule input_rule = InputRule::Trapezoidal;

  void validate() const;
};

/// u-bar(t, tau): (u(t) + u(t + tau)) / 2 or u(t + tau / 2).
Vector averaged_input(const ControlSignal& u, InputRule rule, double t, double tau);

enum class ProjectorMode { Onto, Orthogonal };

/// P_v = v v^T / ||v||^2 or I - P_v. Throws ZeroDirection if ||v|| <= floor.
Matrix projector(const Vector& v, ProjectorMode mode, double floor = 0.0);

/// Midpoint two-point average phi((z + w) / 2).
template <template <class> class Out, class T>
Out<T> midpoint_average(const StateMap<Out>& phi, const BasicVector<T>& z, const BasicVector<T>& w) {
  return phi(detail::midpoint(z, w));
}

/// Two-point quantities entering one DG-QSR step.
template <class T>
struct DgTerms {
  BasicVector<T> grad;  // discrete gradient
  T grad_sq;
  BasicVector<T> f;
  BasicMatrix<T> B;
  BasicMatrix<T> D;
  BasicVector<T> ell;
  BasicMatrix<T> W;
  BasicVector<T> h;  // h-bar
};

template <class T>
DgTerms<T> dg_terms(const QsrSystem& sys, const DiscreteGradientKind& kind, const BasicVector<T>& z,
                    const BasicVector<T>& w) {
  DgTerms<T> t;
  t.grad = discrete_gradient(kind, sys.storage, z, w);
  t.grad_sq = squared_norm(t.grad);
  const BasicVector<T> mid = detail::midpoint(z, w);
  t.f = sys.f(mid);
  t.B = sys.B(mid);
  t.D = sys.D(mid);
  t.ell = sys.ell(mid);
  t.W = sys.W(mid);
  const BasicMatrix<T> QD_S = sys.supply.Q.cast<T>() * t.D + sys.supply.S.cast<T>();
  BasicVector<T> rhs = t.B.transpose() * t.grad;
  rhs *= T(0.5);
  rhs += t.W.transpose() * t.ell;
  t.h = solve_dense(QD_S.transpose(), std::move(rhs));
  return t;
}

/// h-bar(z, w) = (Q D-bar + S)^{-T} (1/2 B-bar^T dg + W-bar^T ell-bar).
template <class T>
BasicVector<T> hbar(const QsrSystem& sys, const DiscreteGradientKind& kind, const BasicVector<T>& z,
                    const BasicVector<T>& w) {
  return dg_terms(sys, kind, z, w).h;
}

template <class T>
T gamma_from_terms(const QsrSystem& sys, const DgTerms<T>& t, double floor) {
  if (!(std::sqrt(value_of(t.grad_sq)) > floor))
    throw Error(ErrorCode::ZeroDirection, "discrete gradient norm below the gradient floor");
  const T numerator = dot(t.h, sys.supply.Q.cast<T>() * t.h) - squared_norm(t.ell);
  return numerator / t.grad_sq;
}

/// gamma-bar(z, w) = (h-bar^T Q h-bar - ||ell-bar||^2) / ||dg||^2.
template <class T>
T gammabar(const QsrSystem& sys, const DiscreteGradientKind& kind, const BasicVector<T>& z,
           const BasicVector<T>& w, double floor = 0.0) {
  return gamma_from_terms(sys, dg_terms(sys, kind, z, w), floor);
}

/// Residual of the DG-QSR step from z to w:
///   w - z - tau (gamma-bar dg + P_{dg perp} f-bar + B-bar u-bar).
template <class T>
BasicVector<T> dg_qsr_residual(const QsrSystem& sys, const DiscreteGradientKind& kind, const Vector& z,
                               const BasicVector<T>& w, double tau, const Vector& ubar, double floor) {
  const BasicVector<T> zt = z.cast<T>();
  const DgTerms<T> t = dg_terms(sys, kind, zt, w);
  const T gamma = gamma_from_terms(sys, t, floor);
  const T along = dot(t.grad, t.f) / t.grad_sq;
  BasicVector<T> rate = t.f;
  for (std::size_t i = 0; i < rate.size(); ++i) rate[i] += (gamma - along) * t.grad[i];
  rate += t.B * ubar.cast<T>();
  BasicVector<T> r = w - zt;
  rate *= T(tau);
  r -= rate;
  return r;
}

/// Residual of the implicit midpoint step: w - z - tau (f-bar + B-bar u-bar).
template <class T>
BasicVector<T> midpoint_residual(const QsrSystem& sys, const Vector& z, const BasicVector<T>& w,
                                 double tau, const Vector& ubar) {
  const BasicVector<T> zt = z.cast<T>();
  const BasicVector<T> mid = detail::midpoint(zt, w);
  BasicVector<T> rate = sys.f(mid) + sys.B(mid) * ubar.cast<T>();
  rate *= T(tau);
  return w - zt - rate;
}

struct StepResult {
  Vector next;
  Vector ubar;
  Vector ybar;
  double newton_residual = 0.0;
  int newton_iterations = 0;
  bool converged = false;
};

/// Gradient floor used for a step starting at z.
double step_gradient_floor(const QsrSystem& sys, const SchemeConfig& cfg, const Vector& z);

/// One DG-QSR step. Newton starts from `guess` (z if absent). A step whose
/// Newton residual stays above tolerance is returned with converged = false.
StepResult dg_qsr_step(const QsrSystem& sys, const SchemeConfig& cfg, const ControlSignal& u,
                       const Vector& z, double t, double tau,
                       const std::optional<Vector>& guess = std::nullopt);

StepResult midpoint_step(const QsrSystem& sys, const SchemeConfig& cfg, const ControlSignal& u,
                         const Vector& z, double t, double tau,
                         const std::optional<Vector>& guess = std::nullopt);

struct Trajectory {
  TimeGrid grid;
  std::vector<Vector> states;            // q + 1
  std::vector<Vector> averaged_inputs;   // q
  std::vector<Vector> discrete_outputs;  // q
  std::vector<double> newton_residuals;  // q
  std::vector<int> newton_iterations;    // q
  std::size_t unconverged_steps = 0;
  // Steps that started at a state with ||grad H|| below the gradient floor.
  std::vector<std::size_t> small_gradient_steps;

  double max_newton_residual() const;
};

/// Runs the configured scheme over the grid. Step errors are rethrown with
/// the failing step index attached.
Trajectory integrate(const QsrSystem& sys, const SchemeConfig& cfg, const TimeGrid& grid,
                     const ControlSignal& u, const Vector& z0);

/// Per step: |(H(z_{i+1}) - H(z_i)) / tau_i + ||ell-bar_i + W-bar_i u-bar_i||^2 - s(u-bar_i, y-bar_i)|.
std::vector<double> discrete_power_balance_residuals(const QsrSystem& sys, const Trajectory& traj);

/// Tolerance for matching time nodes between trajectories.
inline constexpr double kGridMatchTolerance = 1e-12;

/// max_i ||z_ref(t_i) - z_i|| / max_i ||z_ref(t_i)|| over the nodes of
/// `traj`, which must all be nodes of `ref`.
double relative_error(const Trajectory& traj, const Trajectory& ref);

}  // namespace qsrdg

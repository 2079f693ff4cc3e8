#include "qsrdg/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsrdg {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "TimeGrid: need at least two nodes");
  if (points_.front() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "TimeGrid: first node must be 0");
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    if (!std::isfinite(points_[i + 1]) || !(points_[i + 1] > points_[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "TimeGrid: nodes must be strictly increasing (index " + std::to_string(i + 1) + ")");
  }
}

TimeGrid TimeGrid::equidistant(double final_time, std::size_t steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "TimeGrid: need at least one step");
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw Error(ErrorCode::InvalidArgument, "TimeGrid: final time must be positive");
  std::vector<double> pts(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    pts[i] = static_cast<double>(i) * final_time / static_cast<double>(steps);
  pts.back() = final_time;
  return TimeGrid(std::move(pts));
}

void SchemeConfig::validate() const {
  newton.validate();
  if (!(gradient_floor >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "SchemeConfig: gradient_floor must be >= 0");
}

Vector averaged_input(const ControlSignal& u, InputRule rule, double t, double tau) {
  if (rule == InputRule::MidpointSample) return u(t + 0.5 * tau);
  Vector avg = u(t) + u(t + tau);
  avg *= 0.5;
  return avg;
}

Matrix projector(const Vector& v, ProjectorMode mode, double floor) {
  const double nv = norm(v);
  if (!(nv > floor))
    throw Error(ErrorCode::ZeroDirection, "projector: direction norm below floor");
  Matrix p = outer(v, v);
  p *= 1.0 / (nv * nv);
  if (mode == ProjectorMode::Onto) return p;
  return Matrix::identity(v.size()) - p;
}

double step_gradient_floor(const QsrSystem& sys, const SchemeConfig& cfg, const Vector& z) {
  return cfg.gradient_floor * (1.0 + norm(sys.storage.gradient(z)));
}

namespace {

StepResult finish(StepResult r, const NewtonResult& nr) {
  r.next = nr.solution;
  r.newton_residual = nr.residual;
  r.newton_iterations = nr.iterations;
  r.converged = nr.converged;
  return r;
}

}  // namespace

StepResult dg_qsr_step(const QsrSystem& sys, const SchemeConfig& cfg, const ControlSignal& u,
                       const Vector& z, double t, double tau, const std::optional<Vector>& guess) {
  const double floor = step_gradient_floor(sys, cfg, z);
  const Vector ubar = averaged_input(u, cfg.input_rule, t, tau);
  const DiscreteGradientKind& kind = cfg.dg_kind;
  const VectorMap residual = [&sys, &kind, &z, tau, &ubar, floor](const auto& w) {
    return dg_qsr_residual(sys, kind, z, w, tau, ubar, floor);
  };
  StepResult r = finish({}, newton_solve(residual, guess.value_or(z), cfg.newton));
  r.ubar = ubar;
  const DgTerms<double> terms = dg_terms(sys, kind, z, r.next);
  r.ybar = terms.h + terms.D * ubar;
  return r;
}

StepResult midpoint_step(const QsrSystem& sys, const SchemeConfig& cfg, const ControlSignal& u,
                         const Vector& z, double t, double tau, const std::optional<Vector>& guess) {
  const Vector ubar = averaged_input(u, cfg.input_rule, t, tau);
  const VectorMap residual = [&sys, &z, tau, &ubar](const auto& w) {
    return midpoint_residual(sys, z, w, tau, ubar);
  };
  StepResult r = finish({}, newton_solve(residual, guess.value_or(z), cfg.newton));
  r.ubar = ubar;
  const Vector mid = detail::midpoint(z, r.next);
  r.ybar = sys.h(mid) + sys.D(mid) * ubar;
  return r;
}

double Trajectory::max_newton_residual() const {
  double m = 0.0;
  for (double r : newton_residuals) m = std::max(m, r);
  return m;
}

Trajectory integrate(const QsrSystem& sys, const SchemeConfig& cfg, const TimeGrid& grid,
                     const ControlSignal& u, const Vector& z0) {
  cfg.validate();
  if (grid.steps() < 1) throw Error(ErrorCode::InvalidArgument, "integrate: empty time grid");
  sys.validate(z0);
  if (!all_finite(z0))
    throw Error(ErrorCode::NonFiniteEvaluation, "integrate: initial state is not finite");

  const std::size_t q = grid.steps();
  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(q + 1);
  traj.averaged_inputs.reserve(q);
  traj.discrete_outputs.reserve(q);
  traj.newton_residuals.reserve(q);
  traj.newton_iterations.reserve(q);
  traj.states.push_back(z0);

  for (std::size_t i = 0; i < q; ++i) {
    const Vector& z = traj.states.back();
    const double t = grid.time(i);
    const double tau = grid.step_size(i);
    StepResult step;
    try {
      if (cfg.scheme == Scheme::DgQsr) {
        if (!(norm(sys.storage.gradient(z)) > step_gradient_floor(sys, cfg, z)))
          traj.small_gradient_steps.push_back(i);
        step = dg_qsr_step(sys, cfg, u, z, t, tau);
      } else {
        step = midpoint_step(sys, cfg, u, z, t, tau);
      }
    } catch (const Error& e) {
      throw Error(e.code(),
                  "step " + std::to_string(i) + " (t = " + std::to_string(t) + "): " + e.what(), i);
    }
    if (!all_finite(step.next))
      throw Error(ErrorCode::NonFiniteEvaluation,
                  "step " + std::to_string(i) + ": non-finite state", i);
    if (!step.converged) ++traj.unconverged_steps;
    traj.averaged_inputs.push_back(std::move(step.ubar));
    traj.discrete_outputs.push_back(std::move(step.ybar));
    traj.newton_residuals.push_back(step.newton_residual);
    traj.newton_iterations.push_back(step.newton_iterations);
    traj.states.push_back(std::move(step.next));
  }
  return traj;
}

std::vector<double> discrete_power_balance_residuals(const QsrSystem& sys, const Trajectory& traj) {
  const std::size_t q = traj.grid.steps();
  if (traj.states.size() != q + 1 || traj.averaged_inputs.size() != q ||
      traj.discrete_outputs.size() != q)
    throw Error(ErrorCode::InvalidArgument,
                "discrete_power_balance_residuals: trajectory lacks step data");
  std::vector<double> out(q);
  for (std::size_t i = 0; i < q; ++i) {
    const Vector& z = traj.states[i];
    const Vector& w = traj.states[i + 1];
    const Vector& ubar = traj.averaged_inputs[i];
    const Vector mid = detail::midpoint(z, w);
    const double tau = traj.grid.step_size(i);
    const double rate = (sys.storage.value(w) - sys.storage.value(z)) / tau;
    const double dissipation = squared_norm(sys.ell(mid) + sys.W(mid) * ubar);
    out[i] = std::abs(rate + dissipation - supply_value(sys.supply, ubar, traj.discrete_outputs[i]));
  }
  return out;
}

double relative_error(const Trajectory& traj, const Trajectory& ref) {
  const auto& ref_t = ref.grid.points();
  if (ref.states.size() != ref_t.size() || traj.states.size() != traj.grid.points().size())
    throw Error(ErrorCode::InvalidArgument, "relative_error: trajectory states do not match grid");
  double max_err = 0.0;
  double max_ref = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.grid.time(i);
    auto it = std::lower_bound(ref_t.begin(), ref_t.end(), t - kGridMatchTolerance);
    if (it == ref_t.end() || std::abs(*it - t) > kGridMatchTolerance)
      throw Error(ErrorCode::GridMismatch,
                  "relative_error: node t = " + std::to_string(t) + " is not a reference node");
    const Vector& zr = ref.states[static_cast<std::size_t>(it - ref_t.begin())];
    max_err = std::max(max_err, norm(zr - traj.states[i]));
    max_ref = std::max(max_ref, norm(zr));
  }
  if (!(max_ref > 0.0))
    throw Error(ErrorCode::InvalidArgument, "relative_error: reference is identically zero");
  return max_err / max_ref;
}

}  // namespace qsrdg

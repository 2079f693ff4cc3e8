#include "qsrdg/qsrdg.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "qsrdg/examples.hpp"
#include "qsrdg/integrators.hpp"

#ifndef QSRDG_VERSION_STRING
#define QSRDG_VERSION_STRING "0.0.0"
#endif

struct qsrdg_example {
  qsrdg::ExampleSetup setup;
};

struct qsrdg_trajectory {
  qsrdg::Trajectory trajectory;
  std::size_t input_dim = 0;
  bool has_step_data = false;
};

namespace {

thread_local std::string last_message;
thread_local long last_step = -1;

qsrdg_status to_status(qsrdg::ErrorCode code) {
  using qsrdg::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return QSRDG_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return QSRDG_ERR_DIMENSION_MISMATCH;
    case ErrorCode::SingularMatrix: return QSRDG_ERR_SINGULAR_MATRIX;
    case ErrorCode::NonFiniteEvaluation: return QSRDG_ERR_NON_FINITE;
    case ErrorCode::ZeroDirection: return QSRDG_ERR_ZERO_DIRECTION;
    case ErrorCode::NewtonDidNotConverge: return QSRDG_ERR_NEWTON_NOT_CONVERGED;
    case ErrorCode::GridMismatch: return QSRDG_ERR_GRID_MISMATCH;
    case ErrorCode::AreNotConverged: return QSRDG_ERR_ARE_NOT_CONVERGED;
    case ErrorCode::NotStabilizing: return QSRDG_ERR_NOT_STABILIZING;
    case ErrorCode::UnknownExample: return QSRDG_ERR_UNKNOWN_EXAMPLE;
  }
  return QSRDG_ERR_INTERNAL;
}

qsrdg_status fail(qsrdg_status status, std::string message, long step = -1) {
  last_message = std::move(message);
  last_step = step;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
qsrdg_status guarded(Body&& body) {
  try {
    body();
    return QSRDG_OK;
  } catch (const qsrdg::Error& e) {
    return fail(to_status(e.code()), e.what(),
                e.step() ? static_cast<long>(*e.step()) : -1);
  } catch (const std::bad_alloc&) {
    return fail(QSRDG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QSRDG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QSRDG_ERR_INTERNAL, "unknown error");
  }
}

qsrdg_status null_argument(const char* name) {
  return fail(QSRDG_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw qsrdg::Error(qsrdg::ErrorCode::DimensionMismatch,
                       std::string(what) + ": length " + std::to_string(got) + ", expected " +
                           std::to_string(want));
}

qsrdg::Vector to_vector(const double* data, std::size_t n) {
  return qsrdg::Vector(std::vector<double>(data, data + n));
}

void copy_out(const qsrdg::Vector& v, double* out, std::size_t len, const char* what) {
  check_length(len, v.size(), what);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
}

qsrdg::SchemeConfig to_config(const qsrdg_config& c) {
  qsrdg::SchemeConfig cfg;
  switch (c.scheme) {
    case QSRDG_SCHEME_DG: cfg.scheme = qsrdg::Scheme::DgQsr; break;
    case QSRDG_SCHEME_MIDPOINT: cfg.scheme = qsrdg::Scheme::ImplicitMidpoint; break;
    default: throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "config: unknown scheme");
  }
  switch (c.dg_kind) {
    case QSRDG_DG_GONZALEZ: cfg.dg_kind = qsrdg::DiscreteGradientKind::gonzalez(); break;
    case QSRDG_DG_ITOH_ABE: cfg.dg_kind = qsrdg::DiscreteGradientKind::itoh_abe(); break;
    case QSRDG_DG_MEAN_VALUE:
      cfg.dg_kind = qsrdg::DiscreteGradientKind::mean_value(c.mean_value_order);
      break;
    default:
      throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "config: unknown discrete gradient");
  }
  switch (c.jacobian_mode) {
    case QSRDG_JACOBIAN_DUAL: cfg.newton.jacobian_mode = qsrdg::JacobianMode::AutomaticDual; break;
    case QSRDG_JACOBIAN_CENTRAL_DIFFERENCE:
      cfg.newton.jacobian_mode = qsrdg::JacobianMode::CentralDifference;
      break;
    default:
      throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "config: unknown jacobian mode");
  }
  switch (c.input_rule) {
    case QSRDG_INPUT_TRAPEZOIDAL: cfg.input_rule = qsrdg::InputRule::Trapezoidal; break;
    case QSRDG_INPUT_MIDPOINT_SAMPLE: cfg.input_rule = qsrdg::InputRule::MidpointSample; break;
    default: throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "config: unknown input rule");
  }
  cfg.newton.max_iterations = c.max_newton_iterations;
  cfg.newton.residual_tolerance = c.newton_tolerance;
  cfg.gradient_floor = c.gradient_floor;
  cfg.validate();
  return cfg;
}

qsrdg_status run_integration(const qsrdg_example* example, const qsrdg_config* config,
                             const qsrdg::TimeGrid& grid, qsrdg_trajectory** out) {
  auto result = std::make_unique<qsrdg_trajectory>();
  const qsrdg::ExampleSetup& s = example->setup;
  const qsrdg::SchemeConfig cfg = to_config(*config);
  result->trajectory = qsrdg::integrate(s.system, cfg, grid, s.control, s.z0);
  result->input_dim = s.system.m;
  result->has_step_data = true;
  *out = result.release();
  return QSRDG_OK;
}

}  // namespace

extern "C" {

QSRDG_API const char* qsrdg_version(void) { return QSRDG_VERSION_STRING; }

QSRDG_API const char* qsrdg_status_name(qsrdg_status status) {
  switch (status) {
    case QSRDG_OK: return "ok";
    case QSRDG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QSRDG_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case QSRDG_ERR_SINGULAR_MATRIX: return "singular matrix";
    case QSRDG_ERR_NON_FINITE: return "non-finite evaluation";
    case QSRDG_ERR_ZERO_DIRECTION: return "zero direction";
    case QSRDG_ERR_NEWTON_NOT_CONVERGED: return "newton did not converge";
    case QSRDG_ERR_GRID_MISMATCH: return "grid mismatch";
    case QSRDG_ERR_ARE_NOT_CONVERGED: return "riccati iteration did not converge";
    case QSRDG_ERR_NOT_STABILIZING: return "not stabilizing";
    case QSRDG_ERR_UNKNOWN_EXAMPLE: return "unknown example";
    case QSRDG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

QSRDG_API const char* qsrdg_last_error_message(void) { return last_message.c_str(); }

QSRDG_API long qsrdg_last_error_step(void) { return last_step; }

QSRDG_API void qsrdg_config_default(qsrdg_config* config) {
  if (!config) return;
  const qsrdg::SchemeConfig d;
  config->scheme = QSRDG_SCHEME_DG;
  config->dg_kind = QSRDG_DG_GONZALEZ;
  config->mean_value_order = qsrdg::DiscreteGradientKind::kDefaultMeanValueOrder;
  config->max_newton_iterations = d.newton.max_iterations;
  config->newton_tolerance = d.newton.residual_tolerance;
  config->jacobian_mode = QSRDG_JACOBIAN_DUAL;
  config->gradient_floor = d.gradient_floor;
  config->input_rule = QSRDG_INPUT_TRAPEZOIDAL;
}

QSRDG_API qsrdg_status qsrdg_example_create(const char* name, unsigned flags,
                                            qsrdg_example** out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    qsrdg::ExampleOptions options;
    options.zero_input = (flags & QSRDG_EXAMPLE_ZERO_INPUT) != 0;
    options.pi_two_channel = (flags & QSRDG_EXAMPLE_PI_TWO_CHANNEL) != 0;
    *out = new qsrdg_example{qsrdg::benchmark_settings(name, options)};
  });
}

QSRDG_API void qsrdg_example_destroy(qsrdg_example* example) { delete example; }

QSRDG_API size_t qsrdg_example_state_dim(const qsrdg_example* example) {
  return example ? example->setup.system.n : 0;
}

QSRDG_API size_t qsrdg_example_input_dim(const qsrdg_example* example) {
  return example ? example->setup.system.m : 0;
}

QSRDG_API qsrdg_status qsrdg_example_initial_state(const qsrdg_example* example, double* z0,
                                                   size_t n) {
  if (!example) return null_argument("example");
  if (!z0) return null_argument("z0");
  return guarded([&] { copy_out(example->setup.z0, z0, n, "initial state"); });
}

QSRDG_API qsrdg_status qsrdg_example_control(const qsrdg_example* example, double t, double* u,
                                             size_t m) {
  if (!example) return null_argument("example");
  if (!u) return null_argument("u");
  return guarded([&] { copy_out(example->setup.control(t), u, m, "control"); });
}

QSRDG_API qsrdg_status qsrdg_example_storage(const qsrdg_example* example, const double* z,
                                             size_t n, double* value) {
  if (!example) return null_argument("example");
  if (!z || !value) return null_argument("z/value");
  return guarded([&] {
    check_length(n, example->setup.system.n, "state");
    *value = example->setup.system.storage.value(to_vector(z, n));
  });
}

QSRDG_API qsrdg_status qsrdg_example_hill_moylan(const qsrdg_example* example, const double* z,
                                                 size_t n, double residuals[3]) {
  if (!example) return null_argument("example");
  if (!z || !residuals) return null_argument("z/residuals");
  return guarded([&] {
    check_length(n, example->setup.system.n, "state");
    const auto r = qsrdg::hill_moylan_residual(example->setup.system, to_vector(z, n));
    residuals[0] = r.r1;
    residuals[1] = r.r2;
    residuals[2] = r.r3;
  });
}

QSRDG_API qsrdg_status qsrdg_example_power_balance_residual(const qsrdg_example* example,
                                                            const double* z, size_t n,
                                                            const double* u, size_t m,
                                                            double* residual) {
  if (!example) return null_argument("example");
  if (!z || !u || !residual) return null_argument("z/u/residual");
  return guarded([&] {
    const auto& sys = example->setup.system;
    check_length(n, sys.n, "state");
    check_length(m, sys.m, "input");
    *residual = qsrdg::continuous_power_balance_residual(sys, to_vector(z, n), to_vector(u, m));
  });
}

QSRDG_API qsrdg_status qsrdg_integrate(const qsrdg_example* example, const qsrdg_config* config,
                                       double final_time, size_t steps, qsrdg_trajectory** out) {
  if (!example) return null_argument("example");
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    run_integration(example, config, qsrdg::TimeGrid::equidistant(final_time, steps), out);
  });
}

QSRDG_API qsrdg_status qsrdg_integrate_grid(const qsrdg_example* example,
                                            const qsrdg_config* config, const double* times,
                                            size_t count, qsrdg_trajectory** out) {
  if (!example) return null_argument("example");
  if (!config) return null_argument("config");
  if (!times) return null_argument("times");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    run_integration(example, config, qsrdg::TimeGrid(std::vector<double>(times, times + count)),
                    out);
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_from_states(const double* times, size_t count,
                                                    const double* states, size_t n,
                                                    qsrdg_trajectory** out) {
  if (!times || !states) return null_argument("times/states");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (n == 0) throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "state dimension is zero");
    auto result = std::make_unique<qsrdg_trajectory>();
    result->trajectory.grid = qsrdg::TimeGrid(std::vector<double>(times, times + count));
    result->trajectory.states.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      result->trajectory.states.push_back(to_vector(states + i * n, n));
    *out = result.release();
  });
}

QSRDG_API void qsrdg_trajectory_destroy(qsrdg_trajectory* trajectory) { delete trajectory; }

QSRDG_API size_t qsrdg_trajectory_steps(const qsrdg_trajectory* trajectory) {
  return trajectory ? trajectory->trajectory.grid.steps() : 0;
}

QSRDG_API size_t qsrdg_trajectory_state_dim(const qsrdg_trajectory* trajectory) {
  return trajectory && !trajectory->trajectory.states.empty()
             ? trajectory->trajectory.states.front().size()
             : 0;
}

QSRDG_API size_t qsrdg_trajectory_input_dim(const qsrdg_trajectory* trajectory) {
  return trajectory ? trajectory->input_dim : 0;
}

QSRDG_API int qsrdg_trajectory_has_step_data(const qsrdg_trajectory* trajectory) {
  return trajectory && trajectory->has_step_data ? 1 : 0;
}

QSRDG_API size_t qsrdg_trajectory_unconverged_steps(const qsrdg_trajectory* trajectory) {
  return trajectory ? trajectory->trajectory.unconverged_steps : 0;
}

namespace {

void check_node(const qsrdg_trajectory* t, std::size_t i) {
  if (i >= t->trajectory.states.size())
    throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "node index out of range");
}

void check_step(const qsrdg_trajectory* t, std::size_t i) {
  if (!t->has_step_data)
    throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "trajectory has no step data");
  if (i >= t->trajectory.grid.steps())
    throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "step index out of range");
}

}  // namespace

QSRDG_API qsrdg_status qsrdg_trajectory_time(const qsrdg_trajectory* trajectory, size_t i,
                                             double* t) {
  if (!trajectory || !t) return null_argument("trajectory/t");
  return guarded([&] {
    check_node(trajectory, i);
    *t = trajectory->trajectory.grid.time(i);
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_state(const qsrdg_trajectory* trajectory, size_t i,
                                              double* z, size_t n) {
  if (!trajectory || !z) return null_argument("trajectory/z");
  return guarded([&] {
    check_node(trajectory, i);
    copy_out(trajectory->trajectory.states[i], z, n, "state");
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_averaged_input(const qsrdg_trajectory* trajectory,
                                                       size_t i, double* u, size_t m) {
  if (!trajectory || !u) return null_argument("trajectory/u");
  return guarded([&] {
    check_step(trajectory, i);
    copy_out(trajectory->trajectory.averaged_inputs[i], u, m, "averaged input");
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_discrete_output(const qsrdg_trajectory* trajectory,
                                                        size_t i, double* y, size_t m) {
  if (!trajectory || !y) return null_argument("trajectory/y");
  return guarded([&] {
    check_step(trajectory, i);
    copy_out(trajectory->trajectory.discrete_outputs[i], y, m, "discrete output");
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_newton_residual(const qsrdg_trajectory* trajectory,
                                                        size_t i, double* residual) {
  if (!trajectory || !residual) return null_argument("trajectory/residual");
  return guarded([&] {
    check_step(trajectory, i);
    *residual = trajectory->trajectory.newton_residuals[i];
  });
}

QSRDG_API qsrdg_status qsrdg_trajectory_newton_iterations(const qsrdg_trajectory* trajectory,
                                                          size_t i, int* iterations) {
  if (!trajectory || !iterations) return null_argument("trajectory/iterations");
  return guarded([&] {
    check_step(trajectory, i);
    *iterations = trajectory->trajectory.newton_iterations[i];
  });
}

QSRDG_API qsrdg_status qsrdg_balance_residuals(const qsrdg_example* example,
                                               const qsrdg_trajectory* trajectory, double* out,
                                               size_t len) {
  if (!example || !trajectory) return null_argument("example/trajectory");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (!trajectory->has_step_data)
      throw qsrdg::Error(qsrdg::ErrorCode::InvalidArgument, "trajectory has no step data");
    const auto res =
        qsrdg::discrete_power_balance_residuals(example->setup.system, trajectory->trajectory);
    check_length(len, res.size(), "balance residuals");
    std::copy(res.begin(), res.end(), out);
  });
}

QSRDG_API qsrdg_status qsrdg_relative_error(const qsrdg_trajectory* trajectory,
                                            const qsrdg_trajectory* reference, double* error) {
  if (!trajectory || !reference || !error) return null_argument("trajectory/reference/error");
  return guarded(
      [&] { *error = qsrdg::relative_error(trajectory->trajectory, reference->trajectory); });
}

}  // extern "C"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "qsrdg/qsrdg.h"

namespace {

struct Example {
  explicit Example(const char* name, unsigned flags = 0) {
    status = qsrdg_example_create(name, flags, &handle);
  }
  ~Example() { qsrdg_example_destroy(handle); }
  qsrdg_example* handle = nullptr;
  qsrdg_status status;
};

struct Trajectory {
  ~Trajectory() { qsrdg_trajectory_destroy(handle); }
  qsrdg_trajectory* handle = nullptr;
};

qsrdg_config default_config() {
  qsrdg_config cfg;
  qsrdg_config_default(&cfg);
  return cfg;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(qsrdg_version(), "0.1.0");
  EXPECT_STREQ(qsrdg_status_name(QSRDG_OK), "ok");
  EXPECT_STREQ(qsrdg_status_name(QSRDG_ERR_ZERO_DIRECTION), "zero direction");
  EXPECT_STREQ(qsrdg_status_name(static_cast<qsrdg_status>(1234)), "unknown status");
}

TEST(CApi, DefaultConfig) {
  const qsrdg_config cfg = default_config();
  EXPECT_EQ(cfg.scheme, QSRDG_SCHEME_DG);
  EXPECT_EQ(cfg.dg_kind, QSRDG_DG_GONZALEZ);
  EXPECT_EQ(cfg.max_newton_iterations, 10);
  EXPECT_EQ(cfg.newton_tolerance, 1e-13);
  EXPECT_EQ(cfg.mean_value_order, 5);
  EXPECT_EQ(cfg.input_rule, QSRDG_INPUT_TRAPEZOIDAL);
  qsrdg_config_default(nullptr);
}

TEST(CApi, UnknownExample) {
  Example ex("double-pendulum");
  EXPECT_EQ(ex.status, QSRDG_ERR_UNKNOWN_EXAMPLE);
  EXPECT_EQ(ex.handle, nullptr);
  EXPECT_NE(std::string(qsrdg_last_error_message()).find("double-pendulum"), std::string::npos);
}

TEST(CApi, NullArguments) {
  qsrdg_example* out = nullptr;
  EXPECT_EQ(qsrdg_example_create(nullptr, 0, &out), QSRDG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(qsrdg_example_create("pi", 0, nullptr), QSRDG_ERR_INVALID_ARGUMENT);
  double v;
  EXPECT_EQ(qsrdg_example_storage(nullptr, &v, 1, &v), QSRDG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(qsrdg_example_state_dim(nullptr), 0u);
  qsrdg_example_destroy(nullptr);
  qsrdg_trajectory_destroy(nullptr);
}

TEST(CApi, ExampleQueries) {
  Example ex("pendulum");
  ASSERT_EQ(ex.status, QSRDG_OK);
  EXPECT_EQ(qsrdg_example_state_dim(ex.handle), 2u);
  EXPECT_EQ(qsrdg_example_input_dim(ex.handle), 1u);
  double z0[2];
  ASSERT_EQ(qsrdg_example_initial_state(ex.handle, z0, 2), QSRDG_OK);
  EXPECT_DOUBLE_EQ(z0[0], std::atan(1.0));
  EXPECT_EQ(qsrdg_example_initial_state(ex.handle, z0, 3), QSRDG_ERR_DIMENSION_MISMATCH);
  double u;
  ASSERT_EQ(qsrdg_example_control(ex.handle, 0.25, &u, 1), QSRDG_OK);
  EXPECT_DOUBLE_EQ(u, std::sin(0.5));
  const double z[2] = {std::acos(-1.0), 0.0};
  double h;
  ASSERT_EQ(qsrdg_example_storage(ex.handle, z, 2, &h), QSRDG_OK);
  EXPECT_NEAR(h, 19.62, 1e-13);
  double r[3];
  ASSERT_EQ(qsrdg_example_hill_moylan(ex.handle, z0, 2, r), QSRDG_OK);
  EXPECT_LE(r[0] + r[1] + r[2], 1e-12);
  double pb;
  ASSERT_EQ(qsrdg_example_power_balance_residual(ex.handle, z0, 2, &u, 1, &pb), QSRDG_OK);
  EXPECT_LE(pb, 1e-12);
  EXPECT_EQ(qsrdg_example_power_balance_residual(ex.handle, z0, 1, &u, 1, &pb),
            QSRDG_ERR_DIMENSION_MISMATCH);
}

TEST(CApi, FlagsSelectVariants) {
  Example two("pi", QSRDG_EXAMPLE_PI_TWO_CHANNEL | QSRDG_EXAMPLE_ZERO_INPUT);
  ASSERT_EQ(two.status, QSRDG_OK);
  EXPECT_EQ(qsrdg_example_state_dim(two.handle), 2u);
  double u[2] = {1.0, 1.0};
  ASSERT_EQ(qsrdg_example_control(two.handle, 0.5, u, 2), QSRDG_OK);
  EXPECT_EQ(u[0], 0.0);
  EXPECT_EQ(u[1], 0.0);
}

TEST(CApi, IntegrateAndBalance) {
  Example ex("synthetic");
  ASSERT_EQ(ex.status, QSRDG_OK);
  const qsrdg_config cfg = default_config();
  Trajectory t;
  ASSERT_EQ(qsrdg_integrate(ex.handle, &cfg, 10.0, 1000, &t.handle), QSRDG_OK);
  EXPECT_EQ(qsrdg_trajectory_steps(t.handle), 1000u);
  EXPECT_EQ(qsrdg_trajectory_state_dim(t.handle), 1u);
  EXPECT_EQ(qsrdg_trajectory_input_dim(t.handle), 1u);
  EXPECT_EQ(qsrdg_trajectory_has_step_data(t.handle), 1);
  EXPECT_EQ(qsrdg_trajectory_unconverged_steps(t.handle), 0u);
  double time;
  ASSERT_EQ(qsrdg_trajectory_time(t.handle, 1000, &time), QSRDG_OK);
  EXPECT_EQ(time, 10.0);
  EXPECT_EQ(qsrdg_trajectory_time(t.handle, 1001, &time), QSRDG_ERR_INVALID_ARGUMENT);
  double ubar, ybar, res;
  int iters;
  ASSERT_EQ(qsrdg_trajectory_averaged_input(t.handle, 0, &ubar, 1), QSRDG_OK);
  ASSERT_EQ(qsrdg_trajectory_discrete_output(t.handle, 0, &ybar, 1), QSRDG_OK);
  ASSERT_EQ(qsrdg_trajectory_newton_residual(t.handle, 0, &res), QSRDG_OK);
  ASSERT_EQ(qsrdg_trajectory_newton_iterations(t.handle, 0, &iters), QSRDG_OK);
  EXPECT_NEAR(ubar, 0.5 * (std::exp(-16.0) + std::exp(-49.0) + std::exp(-3.99 * 3.99) +
                           std::exp(-6.99 * 6.99)),
              1e-18);
  EXPECT_LE(res, 1e-13);
  EXPECT_GE(iters, 1);
  EXPECT_EQ(qsrdg_trajectory_newton_residual(t.handle, 1000, &res), QSRDG_ERR_INVALID_ARGUMENT);

  std::vector<double> balance(1000);
  ASSERT_EQ(qsrdg_balance_residuals(ex.handle, t.handle, balance.data(), balance.size()), QSRDG_OK);
  for (double b : balance) EXPECT_LE(b, 1e-10);
  EXPECT_EQ(qsrdg_balance_residuals(ex.handle, t.handle, balance.data(), 999),
            QSRDG_ERR_DIMENSION_MISMATCH);
}

TEST(CApi, ConfigValidation) {
  Example ex("pendulum");
  Trajectory t;
  qsrdg_config cfg = default_config();
  cfg.scheme = 7;
  EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 1.0, 10, &t.handle), QSRDG_ERR_INVALID_ARGUMENT);
  cfg = default_config();
  cfg.dg_kind = QSRDG_DG_MEAN_VALUE;
  cfg.mean_value_order = 11;
  EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 1.0, 10, &t.handle), QSRDG_ERR_INVALID_ARGUMENT);
  cfg = default_config();
  cfg.max_newton_iterations = 0;
  EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 1.0, 10, &t.handle), QSRDG_ERR_INVALID_ARGUMENT);
  cfg = default_config();
  EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 1.0, 0, &t.handle), QSRDG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(t.handle, nullptr);
}

TEST(CApi, EveryConfigurationRuns) {
  Example ex("lti-ocp");
  for (int scheme : {QSRDG_SCHEME_DG, QSRDG_SCHEME_MIDPOINT})
    for (int kind : {QSRDG_DG_GONZALEZ, QSRDG_DG_ITOH_ABE, QSRDG_DG_MEAN_VALUE})
      for (int jac : {QSRDG_JACOBIAN_DUAL, QSRDG_JACOBIAN_CENTRAL_DIFFERENCE})
        for (int rule : {QSRDG_INPUT_TRAPEZOIDAL, QSRDG_INPUT_MIDPOINT_SAMPLE}) {
          qsrdg_config cfg = default_config();
          cfg.scheme = scheme;
          cfg.dg_kind = kind;
          cfg.jacobian_mode = jac;
          cfg.input_rule = rule;
          Trajectory t;
          EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 1.0, 50, &t.handle), QSRDG_OK);
        }
}

TEST(CApi, GridValidation) {
  Example ex("pi", QSRDG_EXAMPLE_ZERO_INPUT);
  // Grid not starting at zero.
  const double bad[3] = {0.5, 0.6, 0.7};
  Trajectory t;
  const qsrdg_config cfg = default_config();
  EXPECT_EQ(qsrdg_integrate_grid(ex.handle, &cfg, bad, 3, &t.handle), QSRDG_ERR_INVALID_ARGUMENT);
  const double ok[3] = {0.0, 0.1, 0.3};
  ASSERT_EQ(qsrdg_integrate_grid(ex.handle, &cfg, ok, 3, &t.handle), QSRDG_OK);
  EXPECT_EQ(qsrdg_last_error_step(), -1);
}

TEST(CApi, ZeroDirectionCarriesStep) {
  // The synthetic system without input decays towards its equilibrium; a
  // strict gradient floor stops the run once |grad H| drops below it.
  Example ex("synthetic", QSRDG_EXAMPLE_ZERO_INPUT);
  qsrdg_config cfg = default_config();
  cfg.gradient_floor = 1e-3;
  Trajectory t;
  EXPECT_EQ(qsrdg_integrate(ex.handle, &cfg, 20.0, 2000, &t.handle), QSRDG_ERR_ZERO_DIRECTION);
  EXPECT_GT(qsrdg_last_error_step(), 0);
  EXPECT_NE(std::string(qsrdg_last_error_message()).find("step "), std::string::npos);
}

TEST(CApi, RelativeErrorAgainstStatesOnlyTrajectory) {
  const double times[3] = {0.0, 0.5, 1.0};
  const double ref_states[6] = {1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
  const double states[6] = {1.0, 0.0, 1.25, 0.0, 1.0, 0.0};
  Trajectory ref, traj;
  ASSERT_EQ(qsrdg_trajectory_from_states(times, 3, ref_states, 2, &ref.handle), QSRDG_OK);
  ASSERT_EQ(qsrdg_trajectory_from_states(times, 3, states, 2, &traj.handle), QSRDG_OK);
  EXPECT_EQ(qsrdg_trajectory_has_step_data(ref.handle), 0);
  double ubar;
  EXPECT_EQ(qsrdg_trajectory_averaged_input(ref.handle, 0, &ubar, 1), QSRDG_ERR_INVALID_ARGUMENT);
  double err = -1.0;
  ASSERT_EQ(qsrdg_relative_error(traj.handle, ref.handle, &err), QSRDG_OK);
  EXPECT_DOUBLE_EQ(err, 0.25);

  const double other_times[2] = {0.0, 0.7};
  Trajectory other;
  ASSERT_EQ(qsrdg_trajectory_from_states(other_times, 2, states, 2, &other.handle), QSRDG_OK);
  EXPECT_EQ(qsrdg_relative_error(other.handle, ref.handle, &err), QSRDG_ERR_GRID_MISMATCH);
}

TEST(CApi, ErrorsAreThreadLocal) {
  Example bad("nope");
  ASSERT_EQ(bad.status, QSRDG_ERR_UNKNOWN_EXAMPLE);
  std::string other;
  std::thread th([&] {
    qsrdg_example* e = nullptr;
    qsrdg_example_create("", 0, &e);
    other = qsrdg_last_error_message();
  });
  th.join();
  EXPECT_NE(std::string(qsrdg_last_error_message()).find("nope"), std::string::npos);
  EXPECT_EQ(other.find("nope"), std::string::npos);
}

TEST(CApi, ConcurrentIntegrationsAgree) {
  Example ex("pendulum");
  const qsrdg_config cfg = default_config();
  std::vector<double> finals(4);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k)
    threads.emplace_back([&, k] {
      qsrdg_trajectory* t = nullptr;
      if (qsrdg_integrate(ex.handle, &cfg, 2.0, 200, &t) == QSRDG_OK) {
        double z[2];
        qsrdg_trajectory_state(t, 200, z, 2);
        finals[k] = z[0];
      }
      qsrdg_trajectory_destroy(t);
    });
  for (auto& th : threads) th.join();
  for (int k = 1; k < 4; ++k) EXPECT_EQ(finals[k], finals[0]);
  EXPECT_NE(finals[0], 0.0);
}

}  // namespace

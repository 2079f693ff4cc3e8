#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "qsrdg/examples.hpp"
#include "qsrdg/integrators.hpp"

namespace qsrdg {
namespace {

using testing::Gen;
using testing::max_abs_diff;

ControlSignal zero_input(std::size_t m) {
  return [m](double) { return Vector(m); };
}

// z' = a z + u, y = z, H = z^2/2, passive with ell = sqrt(-a) z.
QsrSystem scalar_linear(double a) {
  QsrSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.p = 1;
  sys.f = [a](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicVector<T>{T(a) * z[0]};
  };
  sys.B = [](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicMatrix<T>{{T(1.0)}};
  };
  sys.h = [](const auto& z) { return z; };
  sys.D = [](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicMatrix<T>(1, 1);
  };
  sys.ell = [a](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicVector<T>{T(std::sqrt(-a)) * z[0]};
  };
  sys.W = sys.D;
  sys.storage.dimension = 1;
  sys.storage.value = [](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return T(0.5) * z[0] * z[0];
  };
  sys.storage.gradient = [](const auto& z) { return z; };
  sys.supply = {Matrix{{0.0}}, Matrix{{0.5}}, Matrix{{0.0}}};
  return sys;
}

SchemeConfig midpoint_config() {
  SchemeConfig cfg;
  cfg.scheme = Scheme::ImplicitMidpoint;
  return cfg;
}

std::vector<ExampleSetup> all_examples() {
  std::vector<ExampleSetup> out;
  for (auto name : example_names()) out.push_back(benchmark_settings(name));
  return out;
}

TEST(TimeGrid, Equidistant) {
  const TimeGrid g = TimeGrid::equidistant(10.0, 1000);
  EXPECT_EQ(g.steps(), 1000u);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.final_time(), 10.0);
  EXPECT_DOUBLE_EQ(g.time(250), 2.5);
  EXPECT_NEAR(g.step_size(17), 0.01, 1e-15);
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW(TimeGrid(std::vector<double>{0.0}), Error);
  EXPECT_THROW(TimeGrid(std::vector<double>{0.1, 0.2}), Error);
  EXPECT_THROW(TimeGrid(std::vector<double>{0.0, 0.2, 0.2}), Error);
  EXPECT_THROW(TimeGrid::equidistant(1.0, 0), Error);
  EXPECT_THROW(TimeGrid::equidistant(-1.0, 3), Error);
  EXPECT_NO_THROW(TimeGrid(std::vector<double>{0.0, 0.1, 0.5}));
}

TEST(SchemeConfig, Validation) {
  SchemeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gradient_floor = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(AveragedInput, RulesAndConsistency) {
  const ControlSignal u = [](double t) { return Vector{t * t}; };
  EXPECT_DOUBLE_EQ(averaged_input(u, InputRule::Trapezoidal, 1.0, 1.0)[0], 2.5);
  EXPECT_DOUBLE_EQ(averaged_input(u, InputRule::MidpointSample, 1.0, 1.0)[0], 2.25);
  for (auto rule : {InputRule::Trapezoidal, InputRule::MidpointSample})
    EXPECT_EQ(averaged_input(u, rule, 0.7, 0.0)[0], u(0.7)[0]);
}

TEST(Projector, Examples) {
  EXPECT_EQ(max_abs_diff(projector(Vector{1.0, 0.0}, ProjectorMode::Onto),
                         Matrix{{1.0, 0.0}, {0.0, 0.0}}),
            0.0);
  EXPECT_LE(max_abs_diff(projector(Vector{1.0, 1.0}, ProjectorMode::Onto),
                         Matrix{{0.5, 0.5}, {0.5, 0.5}}),
            4e-16);
  try {
    projector(Vector{0.0, 0.0}, ProjectorMode::Onto);
    FAIL() << "expected ZeroDirection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDirection);
  }
  EXPECT_THROW(projector(Vector{1e-3}, ProjectorMode::Orthogonal, 1e-2), Error);
}

TEST(ProjectorProperty, Algebra) {
  Gen gen(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 5));
    Vector v = gen.vector(n, 3.0);
    if (norm(v) < 1e-6) continue;
    const Matrix p = projector(v, ProjectorMode::Onto);
    const Matrix q = projector(v, ProjectorMode::Orthogonal);
    EXPECT_LE(max_abs_diff(p * p, p), 1e-13);
    EXPECT_LE(max_abs_diff(q * q, q), 1e-13);
    EXPECT_LE(max_asymmetry(p), 1e-13);
    EXPECT_LE(max_abs_diff(p * v, v), 1e-13 * (1.0 + norm(v)));
    EXPECT_LE(max_abs(q * v), 1e-13 * (1.0 + norm(v)));
    EXPECT_LE(max_abs_diff(p + q, Matrix::identity(n)), 1e-15);
  }
}

TEST(MidpointAverage, ConsistencyAndSymmetry) {
  Gen gen(8);
  const QsrSystem sys = make_pendulum({});
  for (int trial = 0; trial < 100; ++trial) {
    const Vector z = gen.vector(2, 2.0);
    const Vector w = gen.vector(2, 2.0);
    EXPECT_EQ(max_abs_diff(midpoint_average(sys.f, z, z), sys.f(z)), 0.0);
    EXPECT_EQ(max_abs_diff(midpoint_average(sys.f, z, w), midpoint_average(sys.f, w, z)), 0.0);
    EXPECT_EQ(max_abs_diff(midpoint_average(sys.B, z, w), midpoint_average(sys.B, w, z)), 0.0);
  }
}

TEST(Hbar, PendulumIsSecondGradientEntry) {
  const QsrSystem sys = make_pendulum({});
  const auto kind = DiscreteGradientKind::gonzalez();
  const Vector z{0.3, -0.8};
  const Vector w{0.5, 0.1};
  const Vector g = discrete_gradient(kind, sys.storage, z, w);
  EXPECT_NEAR(hbar(sys, kind, z, w)[0], g[1], 1e-15);
  EXPECT_NEAR(hbar(sys, kind, z, z)[0], z[1], 1e-15);
}

TEST(Hbar, PiIsAverage) {
  const QsrSystem sys = make_pi({});
  const auto kind = DiscreteGradientKind::gonzalez();
  EXPECT_NEAR(hbar(sys, kind, Vector{0.4}, Vector{1.0})[0], 0.7, 1e-15);
  EXPECT_NEAR(hbar(sys, kind, Vector{1.0}, Vector{1.0})[0], 1.0, 1e-15);
}

TEST(HbarProperty, ConsistentWithOutputMap) {
  Gen gen(9);
  for (const auto& ex : all_examples()) {
    for (const auto& kind : {DiscreteGradientKind::gonzalez(), DiscreteGradientKind::itoh_abe(),
                             DiscreteGradientKind::mean_value()}) {
      for (int trial = 0; trial < 50; ++trial) {
        const Vector z = gen.vector(ex.system.n, 2.0);
        EXPECT_LE(max_abs_diff(hbar(ex.system, kind, z, z), ex.system.h(z)), 1e-10) << ex.name;
      }
    }
  }
}

TEST(Gammabar, PiIsZero) {
  Gen gen(10);
  const QsrSystem sys = make_pi({});
  for (int trial = 0; trial < 20; ++trial) {
    const Vector z = gen.vector(1, 2.0);
    const Vector w = gen.vector(1, 2.0);
    EXPECT_EQ(gammabar(sys, DiscreteGradientKind::gonzalez(), z, w, 0.0), 0.0);
  }
}

TEST(Gammabar, PendulumAtRest) {
  const QsrSystem sys = make_pendulum({.gravity = 9.81, .friction = 0.2});
  EXPECT_NEAR(gammabar(sys, DiscreteGradientKind::gonzalez(), Vector{0.0, 1.0}, Vector{0.0, 1.0}, 0.0),
              -0.2, 1e-15);
}

TEST(Gammabar, SyntheticRecoversVectorField) {
  const QsrSystem sys = make_synthetic({});
  const Vector z{1.0};
  const double gamma = gammabar(sys, DiscreteGradientKind::gonzalez(), z, z, 0.0);
  const double eta = sys.storage.gradient(z)[0];
  EXPECT_NEAR(gamma * eta, -z[0] - eta, 1e-14);
  EXPECT_NEAR(gamma * eta, sys.f(z)[0], 1e-14);
}

TEST(Gammabar, ZeroDirection) {
  const QsrSystem sys = make_pendulum({});
  try {
    gammabar(sys, DiscreteGradientKind::gonzalez(), Vector{0.0, 0.0}, Vector{0.0, 0.0}, 1e-12);
    FAIL() << "expected ZeroDirection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDirection);
  }
}

TEST(DgQsrStep, PiZeroInputIsFixedPoint) {
  const StepResult r = dg_qsr_step(make_pi({}), {}, zero_input(1), Vector{1.0}, 0.0, 0.1);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.next[0], 1.0);
  EXPECT_EQ(r.newton_iterations, 0);
}

TEST(DgQsrStep, ConservativePendulumKeepsEnergy) {
  const QsrSystem sys = make_pendulum({.gravity = 9.81, .friction = 0.0});
  const Vector z0{std::numbers::pi / 4.0, -1.0};
  const StepResult r = dg_qsr_step(sys, {}, zero_input(1), z0, 0.0, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(std::abs(sys.storage.value(r.next) - sys.storage.value(z0)), 1e-12);
  EXPECT_GT(norm(r.next - z0), 1e-3);
}

TEST(DgQsrStep, SyntheticSingleStepBalance) {
  const ExampleSetup ex = benchmark_settings("synthetic");
  Trajectory t = integrate(ex.system, {}, TimeGrid::equidistant(0.01, 1), ex.control, ex.z0);
  EXPECT_LE(discrete_power_balance_residuals(ex.system, t)[0], 1e-12);
}

TEST(DgQsrStep, ReturnsAveragedInputAndDiscreteOutput) {
  const ExampleSetup ex = benchmark_settings("pi");
  const StepResult r = dg_qsr_step(ex.system, {}, ex.control, ex.z0, 0.2, 0.1);
  EXPECT_NEAR(r.ubar[0], 0.5 * (0.04 + 0.09), 1e-16);
  // PI: ybar = k_I (z + w)/2 + k_P ubar.
  EXPECT_NEAR(r.ybar[0], 0.5 * (ex.z0[0] + r.next[0]) + r.ubar[0], 1e-14);
  // f = 0, B = 1: the scheme reduces to z1 = z0 + tau ubar.
  EXPECT_NEAR(r.next[0], ex.z0[0] + 0.1 * r.ubar[0], 1e-15);
}

TEST(MidpointStep, ExplicitForZeroDrift) {
  const ExampleSetup ex = benchmark_settings("pi");
  const StepResult r = midpoint_step(ex.system, midpoint_config(), ex.control, Vector{0.3}, 0.5, 0.25);
  const double ubar = 0.5 * (ex.control(0.5)[0] + ex.control(0.75)[0]);
  EXPECT_NEAR(r.next[0], 0.3 + 0.25 * ubar, 1e-15);
}

TEST(MidpointStep, ScalarLinearClosedForm) {
  const StepResult r = midpoint_step(scalar_linear(-1.0), midpoint_config(), zero_input(1),
                                     Vector{1.0}, 0.0, 0.1);
  EXPECT_NEAR(r.next[0], 0.95 / 1.05, 1e-15);
  EXPECT_NEAR(r.next[0], 0.904762, 1e-6);
}

TEST(MidpointStep, LocalDifferenceToDgQsrIsThirdOrder) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  auto diff = [&](double tau) {
    const StepResult a = midpoint_step(ex.system, midpoint_config(), ex.control, ex.z0, 0.0, tau);
    const StepResult b = dg_qsr_step(ex.system, {}, ex.control, ex.z0, 0.0, tau);
    return norm(a.next - b.next);
  };
  const double ratio = diff(0.004) / diff(0.002);
  EXPECT_NEAR(ratio, 8.0, 0.5);
}

TEST(Integrate, SingleStepMatchesStepFunction) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  const Trajectory t = integrate(ex.system, {}, TimeGrid::equidistant(0.05, 1), ex.control, ex.z0);
  const StepResult r = dg_qsr_step(ex.system, {}, ex.control, ex.z0, 0.0, 0.05);
  ASSERT_EQ(t.states.size(), 2u);
  EXPECT_EQ(max_abs_diff(t.states[1], r.next), 0.0);
  EXPECT_EQ(max_abs_diff(t.discrete_outputs[0], r.ybar), 0.0);
  const Trajectory m =
      integrate(ex.system, midpoint_config(), TimeGrid::equidistant(0.05, 1), ex.control, ex.z0);
  const StepResult s = midpoint_step(ex.system, midpoint_config(), ex.control, ex.z0, 0.0, 0.05);
  EXPECT_EQ(max_abs_diff(m.states[1], s.next), 0.0);
}

TEST(Integrate, PendulumBenchmarkSettingsSolverHealth) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  const Trajectory t = integrate(ex.system, {}, TimeGrid::equidistant(10.0, 1000), ex.control, ex.z0);
  ASSERT_EQ(t.states.size(), 1001u);
  ASSERT_EQ(t.averaged_inputs.size(), 1000u);
  ASSERT_EQ(t.discrete_outputs.size(), 1000u);
  ASSERT_EQ(t.newton_residuals.size(), 1000u);
  for (const auto& z : t.states) EXPECT_TRUE(all_finite(z));
  EXPECT_LE(t.max_newton_residual(), 1e-12);
  EXPECT_EQ(t.unconverged_steps, 0u);
}

TEST(Integrate, ErrorsCarryStepIndex) {
  // Starting at the equilibrium of the synthetic system: grad H = 0.
  const ExampleSetup ex = benchmark_settings("synthetic");
  try {
    integrate(ex.system, {}, TimeGrid::equidistant(1.0, 10), ex.control, Vector{0.0});
    FAIL() << "expected ZeroDirection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDirection);
    ASSERT_TRUE(e.step().has_value());
    EXPECT_EQ(*e.step(), 0u);
    EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos);
  }
}

TEST(Integrate, RejectsWrongInitialDimension) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  EXPECT_THROW(integrate(ex.system, {}, TimeGrid::equidistant(1.0, 10), ex.control, Vector{1.0}),
               Error);
}

TEST(Integrate, FiniteDifferenceJacobianGivesSameTrajectory) {
  const ExampleSetup ex = benchmark_settings("lti-ocp");
  SchemeConfig fd;
  fd.newton.jacobian_mode = JacobianMode::CentralDifference;
  const TimeGrid grid = TimeGrid::equidistant(2.0, 200);
  const Trajectory a = integrate(ex.system, {}, grid, ex.control, ex.z0);
  const Trajectory b = integrate(ex.system, fd, grid, ex.control, ex.z0);
  EXPECT_LE(max_abs_diff(a.states.back(), b.states.back()), 1e-10);
}

TEST(PowerBalance, EveryExampleAndKind) {
  for (const auto& ex : all_examples()) {
    for (const auto& kind : {DiscreteGradientKind::gonzalez(), DiscreteGradientKind::itoh_abe(),
                             DiscreteGradientKind::mean_value()}) {
      SchemeConfig cfg;
      cfg.dg_kind = kind;
      const Trajectory t = integrate(ex.system, cfg, TimeGrid::equidistant(10.0, 1000), ex.control, ex.z0);
      const auto res = discrete_power_balance_residuals(ex.system, t);
      const double bound = std::max(1e-10, 100.0 * t.max_newton_residual());
      EXPECT_LE(*std::max_element(res.begin(), res.end()), bound) << ex.name << " " << kind.name();
    }
  }
}

TEST(PowerBalance, ConservativePendulum) {
  const QsrSystem sys = make_pendulum({.gravity = 9.81, .friction = 0.0});
  const Vector z0{std::numbers::pi / 4.0, -1.0};
  const Trajectory t = integrate(sys, {}, TimeGrid::equidistant(10.0, 1000), zero_input(1), z0);
  const auto res = discrete_power_balance_residuals(sys, t);
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double dh = std::abs(sys.storage.value(t.states[i + 1]) - sys.storage.value(t.states[i])) /
                      t.grid.step_size(i);
    EXPECT_NEAR(res[i], dh, 1e-12);
    EXPECT_LE(res[i], 1e-11);
  }
}

TEST(PowerBalance, MidpointDoesNotPreserveIt) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  const Trajectory t = integrate(ex.system, midpoint_config(), TimeGrid::equidistant(10.0, 100),
                                 ex.control, ex.z0);
  const auto res = discrete_power_balance_residuals(ex.system, t);
  EXPECT_GT(*std::max_element(res.begin(), res.end()), 1e-4);
}

TEST(PowerBalance, NonEquidistantGrid) {
  Gen gen(21);
  std::vector<double> pts{0.0};
  while (pts.back() < 5.0) pts.push_back(pts.back() + gen.uniform(0.002, 0.03));
  const TimeGrid grid(pts);
  for (const auto& ex : all_examples()) {
    const Trajectory t = integrate(ex.system, {}, grid, ex.control, ex.z0);
    const auto res = discrete_power_balance_residuals(ex.system, t);
    EXPECT_LE(*std::max_element(res.begin(), res.end()), 1e-10) << ex.name;
  }
}

TEST(PowerBalance, RequiresStepData) {
  const ExampleSetup ex = benchmark_settings("pi");
  Trajectory t;
  t.grid = TimeGrid::equidistant(1.0, 2);
  t.states = {Vector{1.0}, Vector{1.0}, Vector{1.0}};
  EXPECT_THROW(discrete_power_balance_residuals(ex.system, t), Error);
}

TEST(DissipationInequality, SyntheticWithoutInput) {
  const ExampleSetup ex = benchmark_settings("synthetic", {.zero_input = true});
  const Trajectory t = integrate(ex.system, {}, TimeGrid::equidistant(5.0, 500), ex.control, ex.z0);
  for (std::size_t i = 0; i < t.grid.steps(); ++i) {
    const double s = supply_value(ex.system.supply, t.averaged_inputs[i], t.discrete_outputs[i]);
    EXPECT_LE(s, 0.0);
    EXPECT_LE(ex.system.storage.value(t.states[i + 1]),
              ex.system.storage.value(t.states[i]) + t.grid.step_size(i) * s + 1e-10);
    EXPECT_LT(ex.system.storage.value(t.states[i + 1]), ex.system.storage.value(t.states[i]));
  }
}

TEST(ResidualMapProperty, ConsistencyAtCurrentState) {
  Gen gen(23);
  for (const auto& ex : all_examples()) {
    int tested = 0;
    while (tested < 20) {
      const Vector z = gen.vector(ex.system.n, 2.0);
      if (!(norm(ex.system.storage.gradient(z)) > 1e-3)) continue;
      const Vector ubar = gen.vector(ex.system.m, 2.0);
      const double tau = gen.uniform(1e-3, 0.1);
      const Vector f = dg_qsr_residual(ex.system, DiscreteGradientKind::gonzalez(), z, z, tau, ubar, 0.0);
      const Vector expected = -tau * (ex.system.f(z) + ex.system.B(z) * ubar);
      EXPECT_LE(max_abs_diff(f, expected), 1e-10) << ex.name;
      ++tested;
    }
  }
}

TEST(RelativeError, RestrictionOfReferenceIsExact) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  const Trajectory ref = integrate(ex.system, {}, TimeGrid::equidistant(1.0, 40), ex.control, ex.z0);
  Trajectory coarse;
  coarse.grid = TimeGrid::equidistant(1.0, 10);
  for (std::size_t i = 0; i <= 10; ++i) coarse.states.push_back(ref.states[4 * i]);
  EXPECT_EQ(relative_error(coarse, ref), 0.0);
}

TEST(RelativeError, ConstantOffset) {
  Trajectory ref, traj;
  ref.grid = traj.grid = TimeGrid::equidistant(1.0, 4);
  for (int i = 0; i <= 4; ++i) {
    ref.states.push_back(Vector{1.0, 0.0});
    traj.states.push_back(Vector{1.0 + 0.125, 0.0});
  }
  EXPECT_DOUBLE_EQ(relative_error(traj, ref), 0.125);
}

TEST(RelativeError, GridMismatch) {
  Trajectory ref, traj;
  ref.grid = TimeGrid::equidistant(1.0, 4);
  traj.grid = TimeGrid::equidistant(1.0, 3);
  ref.states.assign(5, Vector{1.0});
  traj.states.assign(4, Vector{1.0});
  try {
    relative_error(traj, ref);
    FAIL() << "expected GridMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(RelativeError, PendulumOrderTwoRatio) {
  const ExampleSetup ex = benchmark_settings("pendulum");
  const double T = 2.048;
  const Trajectory ref =
      integrate(ex.system, midpoint_config(), TimeGrid::equidistant(T, 16384), ex.control, ex.z0);
  const double e8 =
      relative_error(integrate(ex.system, {}, TimeGrid::equidistant(T, 256), ex.control, ex.z0), ref);
  const double e4 =
      relative_error(integrate(ex.system, {}, TimeGrid::equidistant(T, 512), ex.control, ex.z0), ref);
  EXPECT_NEAR(e8 / e4, 4.0, 4.0 * (std::pow(2.0, 0.3) - 1.0));
}

TEST(ZeroGradient, AbortsDgQsrButNotMidpoint) {
  // PI with u = 0 starting at the origin: grad H = 0 along the whole run.
  const QsrSystem sys = make_pi({});
  SchemeConfig cfg;
  cfg.gradient_floor = 0.0;
  EXPECT_THROW(integrate(sys, cfg, TimeGrid::equidistant(1.0, 2), zero_input(1), Vector{0.0}), Error);
  const Trajectory t =
      integrate(sys, midpoint_config(), TimeGrid::equidistant(1.0, 2), zero_input(1), Vector{0.0});
  EXPECT_EQ(t.states.back()[0], 0.0);
}

}  // namespace
}  // namespace qsrdg

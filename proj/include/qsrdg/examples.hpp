#pragma once

#include <span>
#include <string>
#include <string_view>

#include "qsrdg/numerics.hpp"
#include "qsrdg/qsr_model.hpp"

namespace qsrdg {

/// Damped pendulum theta'' = -g sin(theta) - lambda theta' + u.
struct PendulumParams {
  double gravity = 9.81;
  double friction = 0.2;  // lambda >= 0
};

/// Linear system z' = A z + B u whose storage is the LQR value function
/// 1/2 z^T P_c z, with P_c the stabilizing Riccati solution.
struct LtiOcpParams {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix P_c;

  /// Computes P_c from (A, B, C).
  static LtiOcpParams from_system(Matrix A, Matrix B, Matrix C);
};

/// PI controller z' = u, y = k_I z + k_P u. The two-channel variant runs two
/// independent copies (n = m = 2).
struct PiParams {
  double k_integral = 1.0;
  double k_proportional = 1.0;
  bool two_channel = false;
};

struct SyntheticParams {
  double alpha = 2.0;
  double lambda = 1.0;
};

QsrSystem make_pendulum(const PendulumParams& params);
QsrSystem make_lti_ocp(const LtiOcpParams& params);
QsrSystem make_pi(const PiParams& params);

/// z' = -z - alpha z / (1 + z^4) + 2 lambda u with storage
/// (alpha / 2) atan(z^2). The output is h(z) = -alpha z / (1 + z^4) + lambda u,
/// the sign for which the Hill-Moylan conditions hold.
QsrSystem make_synthetic(const SyntheticParams& params);

/// The benchmark A, B, C of the optimal control example.
LtiOcpParams benchmark_lti_ocp_params();

struct ExampleSetup {
  std::string name;
  QsrSystem system;
  Vector z0;
  ControlSignal control;
};

struct ExampleOptions {
  bool zero_input = false;     // replace the benchmark control by u = 0
  bool pi_two_channel = false; // PI controller with z0 = (1, 1)
};

/// The benchmark configuration for "pendulum", "lti-ocp", "pi" or
/// "synthetic". Throws UnknownExample otherwise.
ExampleSetup benchmark_settings(std::string_view name, const ExampleOptions& options = {});

std::span<const std::string_view> example_names();

}  // namespace qsrdg

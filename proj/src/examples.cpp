#include "qsrdg/examples.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qsrdg/riccati.hpp"

namespace qsrdg {

namespace {

Matrix scaled_identity(std::size_t n, double s) {
  Matrix m = Matrix::identity(n);
  m *= s;
  return m;
}

// Constant matrix map.
MatrixMap constant(Matrix value) {
  return [value = std::move(value)](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return value.cast<T>();
  };
}

VectorMap zeros(std::size_t dim) {
  return [dim](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicVector<T>(dim);
  };
}

// z -> M z for a constant M.
VectorMap linear(Matrix m) {
  return [m = std::move(m)](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return m.cast<T>() * z;
  };
}

}  // namespace

QsrSystem make_pendulum(const PendulumParams& params) {
  if (!(params.friction >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "pendulum: friction must be >= 0");
  const double g = params.gravity;
  const double lambda = params.friction;

  QsrSystem sys;
  sys.n = 2;
  sys.m = 1;
  sys.p = 1;
  sys.f = [g, lambda](const auto& z) {
    using T = scalar_of<decltype(z)>;
    using std::sin;
    return BasicVector<T>{z[1], T(-g) * sin(z[0]) - T(lambda) * z[1]};
  };
  sys.B = constant(Matrix{{0.0}, {1.0}});
  sys.h = [](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return BasicVector<T>{z[1]};
  };
  sys.D = constant(Matrix(1, 1));
  sys.ell = zeros(1);
  sys.W = constant(Matrix(1, 1));
  sys.storage.dimension = 2;
  sys.storage.value = [g](const auto& z) {
    using T = scalar_of<decltype(z)>;
    using std::cos;
    return T(g) * (T(1.0) - cos(z[0])) + T(0.5) * z[1] * z[1];
  };
  sys.storage.gradient = [g](const auto& z) {
    using T = scalar_of<decltype(z)>;
    using std::sin;
    return BasicVector<T>{T(g) * sin(z[0]), z[1]};
  };
  sys.supply = {Matrix{{-lambda}}, Matrix{{0.5}}, Matrix{{0.0}}};
  return sys;
}

LtiOcpParams LtiOcpParams::from_system(Matrix A, Matrix B, Matrix C) {
  LtiOcpParams p;
  p.P_c = solve_are(A, B, C);
  if (!is_positive_definite(p.P_c))
    throw Error(ErrorCode::NotStabilizing, "lti-ocp: Riccati solution is not positive definite");
  p.A = std::move(A);
  p.B = std::move(B);
  p.C = std::move(C);
  return p;
}

LtiOcpParams benchmark_lti_ocp_params() {
  return LtiOcpParams::from_system(Matrix{{0.1, 1.0}, {-1.0, 0.1}}, Matrix{{0.0}, {1.0}},
                                   Matrix{{1.0, 0.0}});
}

QsrSystem make_lti_ocp(const LtiOcpParams& params) {
  const std::size_t n = params.A.rows();
  const std::size_t m = params.B.cols();
  const std::size_t p = params.C.rows();
  if (params.P_c.rows() != n || params.P_c.cols() != n)
    throw Error(ErrorCode::InvalidArgument, "lti-ocp: P_c missing or of wrong shape");

  QsrSystem sys;
  sys.n = n;
  sys.m = m;
  sys.p = p;
  sys.f = linear(params.A);
  sys.B = constant(params.B);
  sys.h = linear(params.B.transpose() * params.P_c);
  sys.D = constant(Matrix(m, m));
  Matrix ell = params.C;
  ell *= 1.0 / std::numbers::sqrt2;
  sys.ell = linear(std::move(ell));
  sys.W = constant(Matrix(p, m));
  sys.storage.dimension = n;
  sys.storage.value = [P = params.P_c](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return T(0.5) * dot(z, P.cast<T>() * z);
  };
  sys.storage.gradient = linear(params.P_c);
  sys.supply = {scaled_identity(m, 0.5), scaled_identity(m, 0.5), Matrix(m, m)};
  return sys;
}

QsrSystem make_pi(const PiParams& params) {
  if (!(params.k_integral >= 0.0) || !(params.k_proportional >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "pi: gains must be >= 0");
  const std::size_t ch = params.two_channel ? 2 : 1;
  const double ki = params.k_integral;
  const double kp = params.k_proportional;

  QsrSystem sys;
  sys.n = ch;
  sys.m = ch;
  sys.p = 1;
  sys.f = zeros(ch);
  sys.B = constant(Matrix::identity(ch));
  sys.h = linear(scaled_identity(ch, ki));
  sys.D = constant(scaled_identity(ch, kp));
  sys.ell = zeros(1);
  sys.W = constant(Matrix(1, ch));
  sys.storage.dimension = ch;
  sys.storage.value = [ki](const auto& z) {
    using T = scalar_of<decltype(z)>;
    return T(0.5 * ki) * squared_norm(z);
  };
  sys.storage.gradient = linear(scaled_identity(ch, ki));
  sys.supply = {Matrix(ch, ch), scaled_identity(ch, 0.5), scaled_identity(ch, -kp)};
  return sys;
}

QsrSystem make_synthetic(const SyntheticParams& params) {
  if (!(params.alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "synthetic: alpha must be > 0");
  if (params.lambda == 0.0) throw Error(ErrorCode::InvalidArgument, "synthetic: lambda must be != 0");
  const double alpha = params.alpha;
  const double lambda = params.lambda;

  QsrSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.p = 1;
  sys.f = [alpha](const auto& z) {
    using T = scalar_of<decltype(z)>;
    const T z2 = z[0] * z[0];
    return BasicVector<T>{-z[0] - T(alpha) * z[0] / (T(1.0) + z2 * z2)};
  };
  sys.B = constant(Matrix{{2.0 * lambda}});
  sys.h = [alpha](const auto& z) {
    using T = scalar_of<decltype(z)>;
    const T z2 = z[0] * z[0];
    return BasicVector<T>{-(T(alpha) * z[0]) / (T(1.0) + z2 * z2)};
  };
  sys.D = constant(Matrix{{lambda}});
  sys.ell = [alpha](const auto& z) {
    using T = scalar_of<decltype(z)>;
    using std::sqrt;
    const T z2 = z[0] * z[0];
    return BasicVector<T>{T(std::sqrt(alpha)) * z[0] / sqrt(T(1.0) + z2 * z2)};
  };
  sys.W = constant(Matrix(1, 1));
  sys.storage.dimension = 1;
  sys.storage.value = [alpha](const auto& z) {
    using T = scalar_of<decltype(z)>;
    using std::atan;
    return T(0.5 * alpha) * atan(z[0] * z[0]);
  };
  sys.storage.gradient = [alpha](const auto& z) {
    using T = scalar_of<decltype(z)>;
    const T z2 = z[0] * z[0];
    return BasicVector<T>{T(alpha) * z[0] / (T(1.0) + z2 * z2)};
  };
  sys.supply = {Matrix{{-1.0}}, Matrix{{0.0}}, Matrix{{lambda * lambda}}};
  return sys;
}

namespace {

constexpr std::array<std::string_view, 4> kExampleNames = {"pendulum", "lti-ocp", "pi",
                                                           "synthetic"};

ControlSignal scalar_control(double (*fn)(double), std::size_t channels) {
  return [fn, channels](double t) { return Vector(channels, fn(t)); };
}

}  // namespace

std::span<const std::string_view> example_names() { return kExampleNames; }

ExampleSetup benchmark_settings(std::string_view name, const ExampleOptions& options) {
  ExampleSetup setup;
  setup.name = std::string(name);
  if (name == "pendulum") {
    setup.system = make_pendulum({.gravity = 9.81, .friction = 0.2});
    setup.z0 = Vector{std::numbers::pi / 4.0, -1.0};
    setup.control = scalar_control([](double t) { return std::sin(2.0 * t); }, 1);
  } else if (name == "lti-ocp") {
    setup.system = make_lti_ocp(benchmark_lti_ocp_params());
    setup.z0 = Vector{1.0, 1.0};
    setup.control = scalar_control([](double t) { return std::sin(t * t / 4.0); }, 1);
  } else if (name == "pi") {
    const bool two = options.pi_two_channel;
    setup.system = make_pi({.k_integral = 1.0, .k_proportional = 1.0, .two_channel = two});
    setup.z0 = two ? Vector{1.0, 1.0} : Vector{1.0};
    setup.control =
        scalar_control([](double t) { return std::min(t * t, std::exp(-t)); }, two ? 2 : 1);
  } else if (name == "synthetic") {
    setup.system = make_synthetic({.alpha = 2.0, .lambda = 1.0});
    setup.z0 = Vector{1.0};
    setup.control = scalar_control(
        [](double t) { return std::exp(-(t - 4.0) * (t - 4.0)) + std::exp(-(t - 7.0) * (t - 7.0)); },
        1);
  } else {
    throw Error(ErrorCode::UnknownExample,
                "unknown example '" + std::string(name) +
                    "' (expected pendulum, lti-ocp, pi or synthetic)");
  }
  if (options.zero_input) {
    const std::size_t m = setup.system.m;
    setup.control = [m](double) { return Vector(m); };
  }
  return setup;
}

}  // namespace qsrdg

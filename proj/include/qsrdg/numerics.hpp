#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsrdg/dual.hpp"
#include "qsrdg/error.hpp"

namespace qsrdg {

namespace detail {
inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) +
                    " does not match " + std::to_string(b));
}
}  // namespace detail

/// Dense column vector over double or Dual.
template <class T>
class BasicVector {
 public:
  using value_type = T;

  BasicVector() = default;
  explicit BasicVector(std::size_t n, T fill = T(0.0)) : data_(n, fill) {}
  BasicVector(std::initializer_list<T> values) : data_(values) {}
  explicit BasicVector(std::vector<T> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<const T> span() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  template <class U>
  BasicVector<U> cast() const {
    BasicVector<U> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = U(data_[i]);
    return out;
  }

  BasicVector& operator+=(const BasicVector& o) {
    detail::require_same_size(size(), o.size(), "vector +=");
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  BasicVector& operator-=(const BasicVector& o) {
    detail::require_same_size(size(), o.size(), "vector -=");
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  BasicVector& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  BasicVector& operator/=(const T& s) {
    for (auto& x : data_) x /= s;
    return *this;
  }

 private:
  std::vector<T> data_;
};

/// Dense row-major matrix over double or Dual.
template <class T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::initializer_list<std::initializer_list<T>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      detail::require_same_size(r.size(), cols_, "matrix literal row");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  BasicMatrix transpose() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  template <class U>
  BasicMatrix<U> cast() const {
    BasicMatrix<U> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = U((*this)(r, c));
    return out;
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    require_same_shape(o, "matrix +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    require_same_shape(o, "matrix -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  BasicMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

 private:
  void require_same_shape(const BasicMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Vector = BasicVector<double>;
using Matrix = BasicMatrix<double>;
using DualVector = BasicVector<Dual>;
using DualMatrix = BasicMatrix<Dual>;

template <class T>
BasicVector<T> operator+(BasicVector<T> a, const BasicVector<T>& b) { return a += b; }
template <class T>
BasicVector<T> operator-(BasicVector<T> a, const BasicVector<T>& b) { return a -= b; }
template <class T>
BasicVector<T> operator-(BasicVector<T> a) {
  for (auto& x : a) x = -x;
  return a;
}
template <class T>
BasicVector<T> operator*(const T& s, BasicVector<T> a) { return a *= s; }
template <class T>
BasicVector<T> operator*(BasicVector<T> a, const T& s) { return a *= s; }
template <class T>
BasicVector<T> operator/(BasicVector<T> a, const T& s) { return a /= s; }
inline DualVector operator*(double s, DualVector a) { return a *= Dual(s); }

template <class T>
BasicMatrix<T> operator+(BasicMatrix<T> a, const BasicMatrix<T>& b) { return a += b; }
template <class T>
BasicMatrix<T> operator-(BasicMatrix<T> a, const BasicMatrix<T>& b) { return a -= b; }
template <class T>
BasicMatrix<T> operator*(const T& s, BasicMatrix<T> a) { return a *= s; }

template <class T>
BasicVector<T> operator*(const BasicMatrix<T>& a, const BasicVector<T>& x) {
  detail::require_same_size(a.cols(), x.size(), "matrix-vector product");
  BasicVector<T> y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    T acc(0.0);
    for (std::size_t c = 0; c < a.cols(); ++c) acc += a(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

template <class T>
BasicMatrix<T> operator*(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  detail::require_same_size(a.cols(), b.rows(), "matrix product");
  BasicMatrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
T dot(const BasicVector<T>& a, const BasicVector<T>& b) {
  detail::require_same_size(a.size(), b.size(), "dot");
  T acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class T>
T squared_norm(const BasicVector<T>& a) { return dot(a, a); }

inline double norm(const Vector& a) { return std::sqrt(squared_norm(a)); }

template <class T>
BasicMatrix<T> outer(const BasicVector<T>& a, const BasicVector<T>& b) {
  BasicMatrix<T> m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs(const Vector& a);

/// max |M - M^T| over all entries; M must be square.
double max_asymmetry(const Matrix& a);

template <class T>
bool all_finite(const BasicVector<T>& v) {
  using std::isfinite;
  for (const auto& x : v)
    if (!isfinite(x)) return false;
  return true;
}

/// Relative pivot threshold of solve_dense.
inline constexpr double kPivotTolerance = 1e-14;

/// Solves A x = b by Gaussian elimination with row pivoting. Pivoting is
/// driven by the real part, so the same routine differentiates through
/// Dual entries.
template <class T>
BasicVector<T> solve_dense(BasicMatrix<T> a, BasicVector<T> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "solve_dense: matrix is not square");
  detail::require_same_size(b.size(), n, "solve_dense right-hand side");

  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += std::abs(value_of(a(r, c)));
    scale = std::max(scale, row);
  }
  const double threshold = kPivotTolerance * scale;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(value_of(a(k, k)));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, k)));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > threshold))
      throw Error(ErrorCode::SingularMatrix,
                  "solve_dense: pivot " + std::to_string(best) + " below threshold in column " +
                      std::to_string(k));
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      std::swap(b[k], b[pivot]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const T factor = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= factor * a(k, c);
      b[r] -= factor * b[k];
    }
  }
  BasicVector<T> x(n);
  for (std::size_t k = n; k-- > 0;) {
    T acc = b[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= a(k, c) * x[c];
    x[k] = acc / a(k, k);
  }
  return x;
}

// Output-type selectors for StateMap.
template <class T>
using ScalarOut = T;
template <class T>
using VectorOut = BasicVector<T>;
template <class T>
using MatrixOut = BasicMatrix<T>;

/// A map of the state that can be evaluated on plain doubles and on Dual
/// numbers. Construct it from a generic lambda taking `const auto&`.
template <template <class> class Out>
class StateMap {
 public:
  StateMap() = default;

  template <class Fn>
    requires(!std::same_as<std::decay_t<Fn>, StateMap> &&
             std::invocable<const Fn&, const Vector&> &&
             std::invocable<const Fn&, const DualVector&>)
  StateMap(Fn fn)  // NOLINT(implicit)
      : real_(fn), dual_(std::move(fn)) {}

  explicit operator bool() const noexcept { return static_cast<bool>(real_); }

  Out<double> operator()(const Vector& z) const { return real_(z); }
  Out<Dual> operator()(const DualVector& z) const { return dual_(z); }

 private:
  std::function<Out<double>(const Vector&)> real_;
  std::function<Out<Dual>(const DualVector&)> dual_;
};

using ScalarMap = StateMap<ScalarOut>;
using VectorMap = StateMap<VectorOut>;
using MatrixMap = StateMap<MatrixOut>;

/// Scalar type of a BasicVector argument inside generic lambdas.
template <class V>
using scalar_of = typename std::decay_t<V>::value_type;

enum class JacobianMode { AutomaticDual, CentralDifference };

struct NewtonSettings {
  int max_iterations = 10;
  double residual_tolerance = 1e-13;
  JacobianMode jacobian_mode = JacobianMode::AutomaticDual;

  void validate() const;
};

Matrix jacobian(const VectorMap& f, const Vector& x, JacobianMode mode);

struct NewtonResult {
  Vector solution;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Plain Newton iteration x <- x - J(x)^{-1} F(x). Stops as soon as
/// ||F(x)|| <= residual_tolerance or after max_iterations updates; in the
/// latter case the final iterate is returned with converged == false.
NewtonResult newton_solve(const VectorMap& f, const Vector& x0, const NewtonSettings& settings);

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

inline constexpr int kMaxQuadratureOrder = 10;

/// Gauss-Legendre rule on [0, 1] with `order` points, order in 1..10.
const QuadratureRule& gauss_legendre_rule(int order);

/// Approximates the integral over [0, 1] of a vector-valued function.
template <class Fn>
auto gauss_legendre(Fn&& f, int order) {
  const QuadratureRule& rule = gauss_legendre_rule(order);
  auto acc = f(rule.nodes[0]);
  using T = typename decltype(acc)::value_type;
  acc *= T(rule.weights[0]);
  for (std::size_t k = 1; k < rule.nodes.size(); ++k) {
    auto v = f(rule.nodes[k]);
    v *= T(rule.weights[k]);
    acc += v;
  }
  if (!all_finite(acc))
    throw Error(ErrorCode::NonFiniteEvaluation, "gauss_legendre: non-finite integrand");
  return acc;
}

}  // namespace qsrdg

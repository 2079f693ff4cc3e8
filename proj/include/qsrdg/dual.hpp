#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace qsrdg {

/// Largest number of independent variables a Dual can carry.
inline constexpr std::size_t kMaxDualDim = 8;

/// Forward-mode dual number: a value plus its partial derivatives with
/// respect to up to kMaxDualDim seeded inputs. Plain doubles promote to
/// constants (all partials zero).
class Dual {
 public:
  constexpr Dual() = default;
  constexpr Dual(double value) : value_(value) {}  // NOLINT(implicit)

  static Dual variable(double value, std::size_t index) {
    Dual d(value);
    d.partials_[index] = 1.0;
    return d;
  }

  constexpr double value() const { return value_; }
  constexpr double partial(std::size_t i) const { return partials_[i]; }
  constexpr const std::array<double, kMaxDualDim>& partials() const {
    return partials_;
  }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    for (std::size_t i = 0; i < kMaxDualDim; ++i) partials_[i] += o.partials_[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    for (std::size_t i = 0; i < kMaxDualDim; ++i) partials_[i] -= o.partials_[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < kMaxDualDim; ++i)
      partials_[i] = partials_[i] * o.value_ + value_ * o.partials_[i];
    value_ *= o.value_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.value_;
    const double q = value_ * inv;
    for (std::size_t i = 0; i < kMaxDualDim; ++i)
      partials_[i] = (partials_[i] - q * o.partials_[i]) * inv;
    value_ = q;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(Dual a) {
    a.value_ = -a.value_;
    for (auto& p : a.partials_) p = -p;
    return a;
  }

  // Chain rule: f(a) with f'(a.value) = slope.
  Dual apply(double new_value, double slope) const {
    Dual r(new_value);
    for (std::size_t i = 0; i < kMaxDualDim; ++i) r.partials_[i] = slope * partials_[i];
    return r;
  }

 private:
  double value_ = 0.0;
  std::array<double, kMaxDualDim> partials_{};
};

inline Dual sin(const Dual& a) { return a.apply(std::sin(a.value()), std::cos(a.value())); }
inline Dual cos(const Dual& a) { return a.apply(std::cos(a.value()), -std::sin(a.value())); }
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value());
  return a.apply(e, e);
}
inline Dual atan(const Dual& a) {
  return a.apply(std::atan(a.value()), 1.0 / (1.0 + a.value() * a.value()));
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.value());
  return a.apply(s, 0.5 / s);
}
inline Dual abs(const Dual& a) { return a.value() < 0.0 ? -a : a; }

inline bool isfinite(const Dual& a) {
  if (!std::isfinite(a.value())) return false;
  for (double p : a.partials())
    if (!std::isfinite(p)) return false;
  return true;
}

inline constexpr double value_of(double x) { return x; }
inline constexpr double value_of(const Dual& x) { return x.value(); }

}  // namespace qsrdg

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "qsrdg/numerics.hpp"

namespace qsrdg {

/// Storage function H together with its analytic gradient.
struct StorageFunction {
  ScalarMap value;
  VectorMap gradient;
  std::size_t dimension = 0;
};

enum class DiscreteGradientVariant { Gonzalez, ItohAbe, MeanValue };

class DiscreteGradientKind {
 public:
  static constexpr int kDefaultMeanValueOrder = 5;

  static DiscreteGradientKind gonzalez() { return DiscreteGradientKind(DiscreteGradientVariant::Gonzalez, 0); }
  static DiscreteGradientKind itoh_abe() { return DiscreteGradientKind(DiscreteGradientVariant::ItohAbe, 0); }
  static DiscreteGradientKind mean_value(int order = kDefaultMeanValueOrder);

  /// Accepts "gonzalez", "itoh-abe", "mean-value".
  static DiscreteGradientKind parse(std::string_view name);

  DiscreteGradientVariant variant() const noexcept { return variant_; }
  int order() const noexcept { return order_; }
  std::string name() const;

  /// Whether dg(z, w) == dg(w, z) holds by construction.
  bool symmetric() const noexcept { return variant_ != DiscreteGradientVariant::ItohAbe; }

 private:
  DiscreteGradientKind(DiscreteGradientVariant v, int order) : variant_(v), order_(order) {}

  DiscreteGradientVariant variant_;
  int order_;
};

// Switch-over thresholds for coincident arguments.
inline constexpr double kGonzalezCoincidence = 1e-12;
inline constexpr double kItohAbeCoincidence = 1e-14;

namespace detail {

template <class T>
BasicVector<T> midpoint(const BasicVector<T>& z, const BasicVector<T>& w) {
  BasicVector<T> m = z + w;
  m *= T(0.5);
  return m;
}

template <class T>
BasicVector<T> gonzalez(const StorageFunction& H, const BasicVector<T>& z, const BasicVector<T>& w) {
  const BasicVector<T> mid = midpoint(z, w);
  BasicVector<T> g = H.gradient(mid);
  const BasicVector<T> step = w - z;
  const T step_sq = squared_norm(step);
  double z_norm_sq = 0.0;
  for (const auto& x : z) z_norm_sq += value_of(x) * value_of(x);
  const double guard = kGonzalezCoincidence * (1.0 + std::sqrt(z_norm_sq));
  if (!(std::sqrt(value_of(step_sq)) > guard)) return g;
  const T correction = (H.value(w) - H.value(z) - dot(g, step)) / step_sq;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += correction * step[i];
  return g;
}

// Coordinate-wise difference quotients along the path z -> w that updates
// one coordinate at a time. A degenerate coordinate uses the partial
// derivative at the current path point, which keeps the telescoping sum
// exact.
template <class T>
BasicVector<T> itoh_abe(const StorageFunction& H, const BasicVector<T>& z, const BasicVector<T>& w) {
  const std::size_t n = z.size();
  BasicVector<T> g(n);
  BasicVector<T> point = z;
  T h_prev = H.value(point);
  for (std::size_t k = 0; k < n; ++k) {
    const T delta = w[k] - z[k];
    if (std::abs(value_of(delta)) <= kItohAbeCoincidence * (1.0 + std::abs(value_of(z[k])))) {
      g[k] = H.gradient(point)[k];
      point[k] = w[k];
      h_prev = H.value(point);
      continue;
    }
    point[k] = w[k];
    const T h_next = H.value(point);
    g[k] = (h_next - h_prev) / delta;
    h_prev = h_next;
  }
  return g;
}

template <class T>
BasicVector<T> mean_value(const StorageFunction& H, const BasicVector<T>& z, const BasicVector<T>& w,
                          int order) {
  return gauss_legendre(
      [&](double s) {
        BasicVector<T> p = z;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = T(1.0 - s) * z[i] + T(s) * w[i];
        return H.gradient(p);
      },
      order);
}

}  // namespace detail

/// Discrete gradient of H between z and w: satisfies
/// H(w) - H(z) = dg(z, w)^T (w - z) and dg(z, z) = grad H(z).
/// The mean-value kind satisfies the first identity up to quadrature error.
template <class T>
BasicVector<T> discrete_gradient(const DiscreteGradientKind& kind, const StorageFunction& H,
                                 const BasicVector<T>& z, const BasicVector<T>& w) {
  detail::require_same_size(z.size(), H.dimension, "discrete_gradient z");
  detail::require_same_size(w.size(), H.dimension, "discrete_gradient w");
  switch (kind.variant()) {
    case DiscreteGradientVariant::Gonzalez: return detail::gonzalez(H, z, w);
    case DiscreteGradientVariant::ItohAbe: return detail::itoh_abe(H, z, w);
    case DiscreteGradientVariant::MeanValue: return detail::mean_value(H, z, w, kind.order());
  }
  throw Error(ErrorCode::InvalidArgument, "discrete_gradient: unknown variant");
}

/// |H(w) - H(z) - dg(z,w)^T (w - z)| / (1 + |H(w) - H(z)|).
double check_mean_value(const DiscreteGradientKind& kind, const StorageFunction& H, const Vector& z,
                        const Vector& w);

}  // namespace qsrdg

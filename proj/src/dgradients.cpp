#include "qsrdg/dgradients.hpp"

#include <cmath>

namespace qsrdg {

DiscreteGradientKind DiscreteGradientKind::mean_value(int order) {
  if (order < 1 || order > kMaxQuadratureOrder)
    throw Error(ErrorCode::InvalidArgument,
                "mean-value discrete gradient: order must be in 1.." +
                    std::to_string(kMaxQuadratureOrder));
  return DiscreteGradientKind(DiscreteGradientVariant::MeanValue, order);
}

DiscreteGradientKind DiscreteGradientKind::parse(std::string_view name) {
  if (name == "gonzalez") return gonzalez();
  if (name == "itoh-abe") return itoh_abe();
  if (name == "mean-value") return mean_value();
  throw Error(ErrorCode::InvalidArgument,
              "unknown discrete gradient '" + std::string(name) +
                  "' (expected gonzalez, itoh-abe or mean-value)");
}

std::string DiscreteGradientKind::name() const {
  switch (variant_) {
    case DiscreteGradientVariant::Gonzalez: return "gonzalez";
    case DiscreteGradientVariant::ItohAbe: return "itoh-abe";
    case DiscreteGradientVariant::MeanValue: return "mean-value";
  }
  return "unknown";
}

double check_mean_value(const DiscreteGradientKind& kind, const StorageFunction& H, const Vector& z,
                        const Vector& w) {
  const double dh = H.value(w) - H.value(z);
  const Vector g = discrete_gradient(kind, H, z, w);
  return std::abs(dh - dot(g, w - z)) / (1.0 + std::abs(dh));
}

}  // namespace qsrdg

#pragma once

#include <cmath>

#include "habkeep/autodiff.hpp"
#include "habkeep/balloon.hpp"

namespace hab::ctrl {

// Squashing map from unconstrained plan variables to admissible actions:
// u = 2 / (1 + exp(-raw)) - 1, strictly increasing, odd, range (-1, 1).
inline double squash(double raw) { return 2.0 / (1.0 + std::exp(-raw)) - 1.0; }

inline ad::Rev squash(const ad::Rev& raw) {
  const double s = squash(raw.v);
  return ad::make_unary(raw, s, 0.5 * (1.0 - s * s));
}

// Inverse of squash on (-1, 1).
inline double unsquash(double u) { return std::log((1.0 + u) / (1.0 - u)); }

template <class S>
S logistic(const S& z) {
  using std::exp;
  return 1.0 / (1.0 + exp(-z));
}

struct CostConfig {
  double discount = 0.99;         // gamma per control step
  double radius_scale = 50.0;     // R: km scale equating dead battery to radius
  double energy_pivot = 0.1;      // penalty centers at 10 % capacity
  double energy_sharpness = 100.0;
};

// Differentiable stage cost: squared distance in km plus a soft low-battery
// penalty worth R^2 when the battery heads to empty.
template <class S>
S stage_cost(const BalloonStateT<S>& s, double e_max, const CostConfig& c) {
  const S xkm = s.x * 1e-3;
  const S ykm = s.y * 1e-3;
  const S z = c.energy_sharpness * (s.E / e_max - c.energy_pivot);
  const S c_power = 1.0 - logistic(z);
  return xkm * xkm + ykm * ykm + (c.radius_scale * c.radius_scale) * c_power;
}

}  // namespace hab::ctrl

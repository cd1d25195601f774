#pragma once

#include <cmath>
#include <stdexcept>

namespace hab::atmo {

// U.S. Standard Atmosphere 1976, layers 0-3 (0-47 km geometric altitude).
// Everything below is a deterministic pure function in SI units (m, Pa, K).

inline constexpr double kGravity = 9.80665;       // m/s^2
inline constexpr double kRDryAir = 287.053;       // J/(kg K)
inline constexpr double kSeaLevelPressure = 101325.0;  // Pa
inline constexpr double kMaxAltitude = 47000.0;   // m
inline constexpr double kMinPressure = 110.0;     // Pa, just above the 47 km level

namespace detail {

struct Layer {
  double base_altitude;  // m
  double base_temp;      // K
  double lapse;          // K/m, 0 for isothermal
  double base_pressure;  // Pa, chained from sea level for C0 continuity
};

struct LayerTable {
  Layer v[4];
};

inline const Layer* layers() {
  // Base pressures are chained at static-init time so the piecewise formula
  // is continuous across layer boundaries to machine precision.
  static const LayerTable table = [] {
    LayerTable t{{
        {0.0, 288.15, -0.0065, kSeaLevelPressure},
        {11000.0, 216.65, 0.0, 0.0},
        {20000.0, 216.65, 0.001, 0.0},
        {32000.0, 228.65, 0.0028, 0.0},
    }};
    for (int i = 1; i < 4; ++i) {
      const Layer& b = t.v[i - 1];
      const double dh = t.v[i].base_altitude - b.base_altitude;
      if (b.lapse == 0.0) {
        t.v[i].base_pressure =
            b.base_pressure * std::exp(-kGravity * dh / (kRDryAir * b.base_temp));
      } else {
        t.v[i].base_pressure =
            b.base_pressure * std::pow(t.v[i].base_temp / b.base_temp,
                                       -kGravity / (b.lapse * kRDryAir));
      }
    }
    return t;
  }();
  return table.v;
}

inline int layer_index_for_altitude(double h) {
  if (h < 11000.0) return 0;
  if (h < 20000.0) return 1;
  if (h < 32000.0) return 2;
  return 3;
}

inline int layer_index_for_pressure(double l) {
  const Layer* t = layers();
  if (l > t[1].base_pressure) return 0;
  if (l > t[2].base_pressure) return 1;
  if (l > t[3].base_pressure) return 2;
  return 3;
}

}  // namespace detail

// Barometric pressure at geometric altitude h in [0, 47000] m.
inline double pressure_at_altitude(double h) {
  if (!(h >= 0.0 && h <= kMaxAltitude))
    throw std::domain_error("pressure_at_altitude: altitude out of [0, 47000] m");
  const detail::Layer& L = detail::layers()[detail::layer_index_for_altitude(h)];
  const double dh = h - L.base_altitude;
  if (L.lapse == 0.0)
    return L.base_pressure * std::exp(-kGravity * dh / (kRDryAir * L.base_temp));
  const double temp_ratio = (L.base_temp + L.lapse * dh) / L.base_temp;
  return L.base_pressure * std::pow(temp_ratio, -kGravity / (L.lapse * kRDryAir));
}

// Exact analytic inverse of pressure_at_altitude, per layer.
inline double altitude_at_pressure(double l) {
  if (!(l >= kMinPressure && l <= kSeaLevelPressure))
    throw std::domain_error("altitude_at_pressure: pressure out of [110, 101325] Pa");
  const detail::Layer& L = detail::layers()[detail::layer_index_for_pressure(l)];
  if (L.lapse == 0.0)
    return L.base_altitude -
           kRDryAir * L.base_temp / kGravity * std::log(l / L.base_pressure);
  const double ratio =
      std::pow(l / L.base_pressure, -L.lapse * kRDryAir / kGravity);
  return L.base_altitude + L.base_temp / L.lapse * (ratio - 1.0);
}

// Ambient (lapse-rate) temperature at pressure level l. Generic over the
// scalar type so planner rollouts can differentiate through it; the branch on
// the layer is taken on the value.
template <class S>
S ambient_temperature(const S& l) {
  const detail::Layer* t = detail::layers();
  const int idx = detail::layer_index_for_pressure(value_of(l));
  const detail::Layer& L = t[idx];
  if (L.lapse == 0.0) return S(L.base_temp);
  // T = T_b * (l / p_b)^(-lapse R / g)
  const double expo = -L.lapse * kRDryAir / kGravity;
  return L.base_temp * pow(l / L.base_pressure, expo);
}

inline double ambient_temperature(double l) {
  const detail::Layer& L = detail::layers()[detail::layer_index_for_pressure(l)];
  if (L.lapse == 0.0) return L.base_temp;
  return L.base_temp * std::pow(l / L.base_pressure, -L.lapse * kRDryAir / kGravity);
}

// Ideal-gas density of dry air.
template <class S>
S air_density(const S& l, const S& temperature) {
  return l / (kRDryAir * temperature);
}

inline double air_density(double l, double temperature) {
  if (!(l > 0.0) || !(temperature > 0.0))
    throw std::domain_error("air_density: non-positive pressure or temperature");
  return l / (kRDryAir * temperature);
}

// Hydrostatic pressure gradient dl/dh = -rho(l) g at pressure level l.
template <class S>
S pressure_gradient(const S& l) {
  return -kGravity * air_density(l, ambient_temperature(l));
}

inline double pressure_gradient(double l) {
  return -kGravity * l / (kRDryAir * ambient_temperature(l));
}

}  // namespace hab::atmo

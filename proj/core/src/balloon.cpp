#include "habkeep/balloon.hpp"

#include <stdexcept>

#include "habkeep/atmosphere.hpp"

namespace hab {

namespace {

// Net vertical force per unit g at float candidate pressure l: buoyancy mass
// minus total mass, with the envelope at ambient temperature.
double float_residual(const BalloonParams& p, double n, double l) {
  const double T = atmo::ambient_temperature(l);
  const double v_free = (p.n_gas + n) * kUniversalGas * T / l;
  const double V = v_free < p.V_max ? v_free : p.V_max;
  return atmo::air_density(l, T) * V - p.total_mass(n);
}

}  // namespace

double BalloonParams::float_pressure(double n) const {
  double lo = 4000.0;
  double hi = 20000.0;
  double f_lo = float_residual(*this, n, lo);
  double f_hi = float_residual(*this, n, hi);
  if (f_lo > 0.0 || f_hi < 0.0)
    throw std::runtime_error("float_pressure: no equilibrium in [4000, 20000] Pa");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = float_residual(*this, n, mid);
    if (f < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-9) break;
  }
  return 0.5 * (lo + hi);
}

double BalloonParams::float_ballonet(double l) const {
  double lo = 0.0;
  double hi = n_max;
  double f_lo = float_residual(*this, lo, l);
  double f_hi = float_residual(*this, hi, l);
  // residual decreases with n (heavier); tolerate band-edge rounding
  if (f_lo < 0.0 && f_lo > -1e-6) return 0.0;
  if (f_hi > 0.0 && f_hi < 1e-6) return n_max;
  if (f_lo < 0.0 || f_hi > 0.0)
    throw std::runtime_error("float_ballonet: pressure outside controllable band");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = float_residual(*this, mid, l);
    if (f > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * n_max) break;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> BalloonParams::pressure_band() const {
  return {float_pressure(0.0), float_pressure(n_max)};
}

}  // namespace hab

#include "habkeep/dynamics.hpp"

namespace hab::dyn {

SurrogateRates calibrate_surrogate_rates(const BalloonParams& p, int grid) {
  const auto [lo, hi] = p.pressure_band();
  double vent_acc = 0.0;
  double pump_acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double l = lo + (hi - lo) * i / (grid - 1);
    const double T = atmo::ambient_temperature(l);
    const double n = p.float_ballonet(l);
    double V = 0.0, p_env = 0.0;
    volume_superpressure(l, n, T, p, V, p_env);
    vent_acc += value_of(acs_vent_efficiency(p_env));
    pump_acc += value_of(acs_pump_efficiency(l));
  }
  SurrogateRates r;
  r.vent = p.k_vent * vent_acc / grid;
  r.pump = p.k_pump * pump_acc / grid;
  return r;
}

}  // namespace hab::dyn

#pragma once

#include <cmath>
#include <utility>

namespace hab {

inline constexpr double kMolarMassAir = 0.02897;  // kg/mol
inline constexpr double kUniversalGas = 8.314;    // J/(mol K)

// State of one superpressure balloon, SI units throughout. (x, y) are the
// horizontal offsets east/north of the station, l the ambient pressure at
// the balloon, n the ballonet air moles, T the envelope gas temperature,
// E the battery energy, V the envelope volume and p_env the superpressure.
template <class S>
struct BalloonStateT {
  S x{};
  S y{};
  S l{};
  S n{};
  S T{};
  S E{};
  S V{};
  S p_env{};
  double t = 0.0;  // s since episode start
  bool gate_latched = false;
};

using BalloonState = BalloonStateT<double>;

// state invariant bounds
inline constexpr double kPressureLo = 5000.0;   // Pa
inline constexpr double kPressureHi = 16000.0;  // Pa

struct BalloonParams {
  double m_dry = 80.0;        // kg, payload + envelope + lift gas
  double n_gas = 3400.0;      // mol helium
  double n_max = 500.0;       // mol ballonet capacity
  double V_max = 900.0;       // m^3
  double C_d = 0.45;
  double area = 45.0;         // m^2
  double gravity = 9.80665;   // m/s^2
  double E_max = 7.2e6;       // J (2 kWh)
  double P_load = 80.0;       // W
  double P_solar_max = 400.0; // W
  double k_vent = 0.08;       // mol/s at u = +1 before efficiency
  double k_pump = 0.05;       // mol/s at u = -1 before efficiency
  double acs_power = 195.0;   // W at u = -1

  double total_mass(double n) const { return m_dry + kMolarMassAir * n; }

  // Pressure level where the balloon floats (vertical force balance) with n
  // moles of ballonet air and envelope temperature equal to ambient. Solved
  // by bisection.
  double float_pressure(double n) const;

  // Ballonet fill that floats at pressure l; inverse of float_pressure.
  double float_ballonet(double l) const;

  // [float_pressure(0), float_pressure(n_max)]: the controllable band.
  std::pair<double, double> pressure_band() const;
};

enum class Fidelity { kPhi0 = 0, kPhi1 = 1, kPhi2 = 2, kPhi3 = 3, kPhi4 = 4 };

inline bool acs_enabled(Fidelity f) { return static_cast<int>(f) >= 1; }
inline bool volume_enabled(Fidelity f) { return static_cast<int>(f) >= 2; }
inline bool thermal_enabled(Fidelity f) { return static_cast<int>(f) >= 3; }
inline bool battery_enabled(Fidelity f) { return static_cast<int>(f) >= 4; }

// Which dot-n model a rollout integrates: the environment's
// efficiency-modulated rates or the planner's piecewise-linear surrogate.
enum class AcsMode { kEnvironment, kSurrogate };

struct SolarConfig {
  double local_offset_hours = 0.0;  // local solar time at t = 0
};

// max(0, sin(...)): zero before 06:00 and after 18:00 local, peaking at noon.
inline double solar_factor(double t, const SolarConfig& solar) {
  const double hours = solar.local_offset_hours + t / 3600.0;
  const double s = std::sin(2.0 * M_PI * (hours - 6.0) / 24.0);
  return s > 0.0 ? s : 0.0;
}

// Hysteretic power-safety gate: once E/E_max drops below 2.5 %, pumping
// (u < 0) is forced to zero until recovery above 5 %.
inline bool power_gate_update(double energy_fraction, bool latched) {
  if (!latched && energy_fraction < 0.025) return true;
  if (latched && energy_fraction > 0.05) return false;
  return latched;
}

struct GateResult {
  double u = 0.0;
  bool latched = false;
};

inline GateResult power_gate(double E, double E_max, double u, bool latched) {
  GateResult out;
  out.latched = power_gate_update(E / E_max, latched);
  out.u = (out.latched && u < 0.0) ? 0.0 : u;
  return out;
}

}  // namespace hab

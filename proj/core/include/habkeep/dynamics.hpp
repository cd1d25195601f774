#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "habkeep/atmosphere.hpp"
#include "habkeep/autodiff.hpp"
#include "habkeep/balloon.hpp"

namespace hab::dyn {

// Defaults of the discrete update: Delta_t = M * delta_t.
inline constexpr double kControlDt = 180.0;  // s
inline constexpr double kSubstepDt = 10.0;   // s
inline constexpr int kSubsteps = 18;

// Piecewise-linear surrogate rates used by planner rollouts in place of the
// environment ACS; magnitudes are band-averaged environment rates.
struct SurrogateRates {
  double vent = 0.0;  // mol/s at u = +1
  double pump = 0.0;  // mol/s at u = -1
};

struct StepOptions {
  Fidelity fidelity = Fidelity::kPhi4;
  AcsMode acs = AcsMode::kEnvironment;
  SurrogateRates surrogate;  // required when acs == kSurrogate
  SolarConfig solar;
  double dt_sub = kSubstepDt;
  int substeps = kSubsteps;
};

struct StepDiag {
  int clamped_pressure = 0;
  int clamped_ballonet = 0;
  int clamped_energy = 0;
};

template <class S>
struct DerivativeT {
  S dx{};
  S dy{};
  S dl{};
  S dn{};
  S dT{};
  S dE{};
};

using Derivative = DerivativeT<double>;

// abs with branch-taken subgradient, usable on double and tracked scalars
inline double abs_generic(double x) { return x >= 0.0 ? x : -x; }
inline ad::Rev abs_generic(const ad::Rev& x) { return ad::abs(x); }

// clamp with branch-taken subgradient
inline double clamp_generic(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}
inline ad::Rev clamp_generic(const ad::Rev& x, double lo, double hi) {
  return ad::clamp(x, lo, hi);
}

// ---------------------------------------------------------------------------
// Vertical dynamics: drag-limited steady-state ascent rate from the balance
// 0 = rho V g - m g - 1/2 rho C_d A |hdot| hdot.
// ---------------------------------------------------------------------------

template <class S>
S vertical_velocity_impl(const S& l, const S& n, const S& V,
                         const BalloonParams& p) {
  using std::sqrt;
  const S rho = atmo::air_density(l, atmo::ambient_temperature(l));
  if (!(value_of(rho) > 0.0))
    throw std::domain_error("vertical_velocity: non-positive air density");
  const S f_net = rho * V * p.gravity - (p.m_dry + kMolarMassAir * n) * p.gravity;
  const S q = 2.0 * abs_generic(f_net) / (rho * p.C_d * p.area);
  const S mag = sqrt(q);
  return value_of(f_net) >= 0.0 ? mag : -mag;
}

template <class S>
S vertical_velocity(const BalloonStateT<S>& s, const BalloonParams& p) {
  return vertical_velocity_impl(s.l, s.n, s.V, p);
}

// ---------------------------------------------------------------------------
// Altitude control system
// ---------------------------------------------------------------------------

// Venting efficiency rises with superpressure; pumping efficiency falls with
// altitude (lower ambient pressure).
template <class S>
S acs_vent_efficiency(const S& p_env) {
  return clamp_generic(0.5 + p_env / 2000.0, 0.5, 1.5);
}

template <class S>
S acs_pump_efficiency(const S& l) {
  return clamp_generic(l / 7000.0, 0.7, 1.3);
}

// Environment ("true") ACS molar rate. u > 0 vents ballonet air (ascend),
// u < 0 pumps it in (descend). Saturates so n stays in [0, n_max].
template <class S>
S acs_rate_env(const S& u, const BalloonStateT<S>& s, const BalloonParams& p) {
  const double uv = value_of(u);
  S rate(0.0);
  if (uv > 0.0)
    rate = -p.k_vent * u * acs_vent_efficiency(s.p_env);
  else if (uv < 0.0)
    rate = p.k_pump * (-u) * acs_pump_efficiency(s.l);
  else
    return S(0.0);
  const double rv = value_of(rate);
  if (value_of(s.n) >= p.n_max && rv > 0.0) return S(0.0);
  if (value_of(s.n) <= 0.0 && rv < 0.0) return S(0.0);
  return rate;
}

template <class S>
S acs_rate_surrogate_impl(const S& u, const SurrogateRates& r) {
  const double uv = value_of(u);
  if (uv > 0.0) return -r.vent * u;
  if (uv < 0.0) return r.pump * (-u);
  return S(0.0);
}

inline double acs_rate_surrogate(double u, const SurrogateRates& r) {
  return acs_rate_surrogate_impl(u, r);
}

// Pump power draw; venting is passive.
template <class S>
S acs_power(const S& u, const BalloonParams& p) {
  if (value_of(u) < 0.0) return p.acs_power * (-u);
  return S(0.0);
}

// ---------------------------------------------------------------------------
// Thermal model: first-order relaxation toward ambient plus solar heating.
// ---------------------------------------------------------------------------

inline constexpr double kThermalTau = 600.0;   // s
inline constexpr double kSolarHeating = 15.0;  // K at full sun

template <class S>
S thermal_rate(const S& T, const S& l, double t, const SolarConfig& solar) {
  const S t_eq = atmo::ambient_temperature(l) + kSolarHeating * solar_factor(t, solar);
  return (t_eq - T) / kThermalTau;
}

// ---------------------------------------------------------------------------
// Volume / superpressure: instantaneous ideal-gas balance. Below full
// stretch the envelope is at ambient pressure; once stretched, added
// gas/heat raises p_env instead of V.
// ---------------------------------------------------------------------------

template <class S>
void volume_superpressure(const S& l, const S& n, const S& T,
                          const BalloonParams& p, S& V, S& p_env) {
  const S v_free = (p.n_gas + n) * kUniversalGas * T / l;
  if (value_of(v_free) < p.V_max) {
    V = v_free;
    p_env = S(0.0);
  } else {
    V = S(p.V_max);
    p_env = (p.n_gas + n) * kUniversalGas * T / p.V_max - l;
  }
}

// ---------------------------------------------------------------------------
// Battery: solar charging minus constant load minus pump power.
// ---------------------------------------------------------------------------

template <class S>
S battery_rate(const S& u, double t, const BalloonParams& p,
               const SolarConfig& solar) {
  return p.P_solar_max * solar_factor(t, solar) - p.P_load - acs_power(u, p);
}

// ---------------------------------------------------------------------------
// Full state derivative at one instant. Disabled submodules contribute
// exactly zero (their states are held).
// ---------------------------------------------------------------------------

template <class S>
DerivativeT<S> derivative(const BalloonStateT<S>& s, const S& wind_u,
                          const S& wind_v, const S& u, const BalloonParams& p,
                          const StepOptions& opt) {
  if (!(value_of(u) >= -1.0 && value_of(u) <= 1.0))
    throw std::invalid_argument("derivative: action outside [-1, 1]");
  DerivativeT<S> d;
  d.dx = wind_u;
  d.dy = wind_v;
  const S hdot = vertical_velocity_impl(s.l, s.n, s.V, p);
  d.dl = hdot * atmo::pressure_gradient(s.l);
  if (acs_enabled(opt.fidelity)) {
    d.dn = opt.acs == AcsMode::kEnvironment
               ? acs_rate_env(u, s, p)
               : acs_rate_surrogate_impl(u, opt.surrogate);
  } else {
    d.dn = S(0.0);
  }
  d.dT = thermal_enabled(opt.fidelity) ? thermal_rate(s.T, s.l, s.t, opt.solar)
                                       : S(0.0);
  d.dE = battery_enabled(opt.fidelity) ? battery_rate(u, s.t, p, opt.solar)
                                       : S(0.0);
  return d;
}

// ---------------------------------------------------------------------------
// Discrete update F_dt: M forward-Euler substeps, wind sampled once per
// substep at the current substep position/time, algebraic states recomputed
// after each substep when the volume submodule is enabled, else held.
// ---------------------------------------------------------------------------

template <class S, class WindFn>
BalloonStateT<S> step(BalloonStateT<S> s, WindFn&& wind_at, const S& u,
                      const BalloonParams& p, const StepOptions& opt,
                      StepDiag* diag = nullptr) {
  for (int m = 0; m < opt.substeps; ++m) {
    S wu(0.0), wv(0.0);
    wind_at(s.x, s.y, s.l, s.t, wu, wv);
    const DerivativeT<S> d = derivative(s, wu, wv, u, p, opt);
    s.x += opt.dt_sub * d.dx;
    s.y += opt.dt_sub * d.dy;
    s.l += opt.dt_sub * d.dl;
    if (acs_enabled(opt.fidelity)) {
      s.n += opt.dt_sub * d.dn;
      if (value_of(s.n) < 0.0 || value_of(s.n) > p.n_max) {
        s.n = clamp_generic(s.n, 0.0, p.n_max);
        if (diag) ++diag->clamped_ballonet;
      }
    }
    if (thermal_enabled(opt.fidelity)) s.T += opt.dt_sub * d.dT;
    if (battery_enabled(opt.fidelity)) {
      s.E += opt.dt_sub * d.dE;
      if (value_of(s.E) < 0.0 || value_of(s.E) > p.E_max) {
        s.E = clamp_generic(s.E, 0.0, p.E_max);
        if (diag) ++diag->clamped_energy;
      }
    }
    if (value_of(s.l) < kPressureLo || value_of(s.l) > kPressureHi) {
      s.l = clamp_generic(s.l, kPressureLo, kPressureHi);
      if (diag) ++diag->clamped_pressure;
    }
    if (volume_enabled(opt.fidelity))
      volume_superpressure(s.l, s.n, s.T, p, s.V, s.p_env);
    s.t += opt.dt_sub;
  }
  return s;
}

// Same update with one action per substep (used by the substep-alternating
// discretization mode).
template <class S, class WindFn>
BalloonStateT<S> step_substeps(BalloonStateT<S> s, WindFn&& wind_at,
                               std::span<const double> u_sub,
                               const BalloonParams& p, const StepOptions& opt,
                               StepDiag* diag = nullptr) {
  StepOptions one = opt;
  one.substeps = 1;
  for (int m = 0; m < opt.substeps; ++m)
    s = step(s, wind_at, S(u_sub[static_cast<std::size_t>(m)]), p, one, diag);
  return s;
}

// Band-averaged environment rates over the controllable band at float
// equilibrium; the magnitudes behind the planner's surrogate.
SurrogateRates calibrate_surrogate_rates(const BalloonParams& p, int grid = 101);

}  // namespace hab::dyn

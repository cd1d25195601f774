#include "habkeep/episode.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "habkeep/atmosphere.hpp"
#include "habkeep/dynamics.hpp"
#include "habkeep/rng.hpp"

namespace hab::harness {

BalloonState sample_initial_state(std::uint64_t seed, const EpisodeConfig& cfg,
                                  SolarConfig* solar_out) {
  SplitMix64 rng = substream(seed, "init-state");
  const auto [band_lo, band_hi] = cfg.params.pressure_band();
  const double margin = cfg.band_margin_frac * (band_hi - band_lo);

  BalloonState s;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double distance = rng.uniform(0.0, cfg.start_distance_max);
    const double bearing = rng.uniform(0.0, 2.0 * M_PI);
    const double l = rng.uniform(band_lo + margin, band_hi - margin);
    const double energy_frac = rng.uniform(cfg.start_energy_min_frac, 1.0);
    const double solar_offset = rng.uniform(0.0, 24.0);
    try {
      s.n = cfg.params.float_ballonet(l);
    } catch (const std::exception&) {
      continue;  // bounded retries with fresh draws
    }
    s.x = distance * std::cos(bearing);
    s.y = distance * std::sin(bearing);
    s.l = l;
    s.T = atmo::ambient_temperature(l);
    s.E = energy_frac * cfg.params.E_max;
    dyn::volume_superpressure(s.l, s.n, s.T, cfg.params, s.V, s.p_env);
    s.t = 0.0;
    s.gate_latched = false;
    if (solar_out) solar_out->local_offset_hours = solar_offset;
    return s;
  }
  throw std::runtime_error("sample_initial_state: float solve failed repeatedly");
}

double time_within_radius(std::span<const TrajectoryRow> rows, double radius) {
  if (rows.empty()) return 0.0;
  const double r2 = radius * radius;
  std::size_t inside = 0;
  for (const TrajectoryRow& row : rows)
    if (row.x * row.x + row.y * row.y <= r2) ++inside;
  return static_cast<double>(inside) / static_cast<double>(rows.size());
}

double reward_episode(std::span<const TrajectoryRow> rows, double radius) {
  double total = 0.0;
  for (const TrajectoryRow& row : rows) {
    const double d = std::hypot(row.x, row.y);
    double r = d <= radius ? 1.0 : 0.4 * std::exp2(-(d - radius) / 100e3);
    if (row.gate) r *= 0.95;
    total += r;
  }
  return total;
}

std::uint64_t wind_fingerprint(const wind::SyntheticWindField& field,
                               const wind::NoiseField& noise) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const auto mix_double = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h = fnv1a64_mix(h, bits);
  };
  for (int ix = -2; ix <= 2; ++ix)
    for (int il = 0; il <= 4; ++il)
      for (int it = 0; it <= 2; ++it) {
        const double x = 80e3 * ix;
        const double y = -60e3 * ix;
        const double l = 5200.0 + 700.0 * il;
        const double t = 43200.0 * it;
        const wind::WindVector w = field.at(x, y, l, t);
        const wind::WindVector b = noise.at(x, y, l, t);
        mix_double(w.u_east);
        mix_double(w.v_north);
        mix_double(b.u_east);
        mix_double(b.v_north);
      }
  return h;
}

EpisodeMetrics run_episode(Agent& agent, const EpisodeConfig& cfg,
                           const RunOptions& opts) {
  EpisodeMetrics metrics;

  const wind::SyntheticWindField field =
      wind::SyntheticWindField::generate(cfg.seed, cfg.wind);
  const wind::NoiseField noise = wind::NoiseField::generate(cfg.seed, cfg.noise);
  metrics.wind_fingerprint = wind_fingerprint(field, noise);

  SolarConfig solar;
  BalloonState state;
  try {
    state = sample_initial_state(cfg.seed, cfg, &solar);
  } catch (const std::exception& e) {
    metrics.failed = true;
    metrics.failure = e.what();
    return metrics;
  }

  EpisodeContext ctx;
  ctx.seed = cfg.seed;
  ctx.forecast = &field;
  ctx.params = cfg.params;
  ctx.solar = solar;
  ctx.fompc = cfg.fompc;
  ctx.substeps = cfg.substeps;
  ctx.dt_sub = cfg.dt_sub;

  dyn::StepOptions env;
  env.fidelity = Fidelity::kPhi4;
  env.acs = AcsMode::kEnvironment;
  env.solar = solar;
  env.dt_sub = cfg.dt_sub;
  env.substeps = cfg.substeps;

  const auto truth = [&field, &noise](const double& x, const double& y,
                                      const double& l, double t, double& u,
                                      double& v) {
    const wind::WindVector w = wind::truth_at(field, noise, x, y, l, t);
    u = w.u_east;
    v = w.v_north;
  };

  std::vector<WindSample> observations;
  observations.reserve(static_cast<std::size_t>(cfg.steps));
  metrics.trajectory.reserve(static_cast<std::size_t>(cfg.steps));

  double decision_seconds = 0.0;
  try {
    agent.begin_episode(ctx);
    for (int k = 0; k < cfg.steps; ++k) {
      observations.push_back(
          {state.x, state.y, state.l, state.t,
           wind::truth_at(field, noise, state.x, state.y, state.l, state.t)});

      const auto t0 = std::chrono::steady_clock::now();
      const AgentAction action = agent.act(state, observations, k);
      decision_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();

      const GateResult gate =
          power_gate(state.E, cfg.params.E_max, action.u, state.gate_latched);
      state.gate_latched = gate.latched;
      if (gate.latched) ++metrics.violations;

      metrics.trajectory.push_back({k, state.t, state.x, state.y, state.l,
                                    state.n, state.T, state.E, state.V,
                                    state.p_env, gate.u, gate.latched});

      dyn::StepDiag diag;
      if (!action.substep_u.empty()) {
        if (static_cast<int>(action.substep_u.size()) != cfg.substeps)
          throw std::runtime_error("agent substep schedule has wrong length");
        std::vector<double> gated = action.substep_u;
        if (gate.latched)
          for (double& u : gated)
            if (u < 0.0) u = 0.0;
        state =
            dyn::step_substeps<double>(state, truth, gated, cfg.params, env, &diag);
      } else {
        state = dyn::step(state, truth, gate.u, cfg.params, env, &diag);
      }
      metrics.clamp_events +=
          diag.clamped_pressure + diag.clamped_ballonet + diag.clamped_energy;
    }
  } catch (const std::exception& e) {
    metrics.failed = true;
    metrics.failure = e.what();
    return metrics;
  }

  metrics.twr = time_within_radius(metrics.trajectory, cfg.radius);
  metrics.reward = reward_episode(metrics.trajectory, cfg.radius);
  metrics.mean_step_time = decision_seconds / cfg.steps;
  const auto diags = agent.planner_diagnostics();
  metrics.replans.assign(diags.begin(), diags.end());
  if (!opts.keep_trajectory) metrics.trajectory.clear();
  return metrics;
}

}  // namespace hab::harness

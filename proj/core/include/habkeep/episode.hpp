#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "habkeep/agents.hpp"
#include "habkeep/balloon.hpp"
#include "habkeep/fompc.hpp"
#include "habkeep/wind_field.hpp"

namespace hab::harness {

struct EpisodeConfig {
  std::uint64_t seed = 0;
  int steps = 960;
  double dt = 180.0;       // s per control step; 960 * 180 s = 2 days
  double dt_sub = 10.0;    // s per Euler substep
  int substeps = 18;
  double radius = 50e3;    // m station radius
  double start_distance_max = 40e3;  // m
  double start_energy_min_frac = 0.5;
  double band_margin_frac = 0.2;  // initial pressure in the mid 60 % of the band
  BalloonParams params;
  wind::SyntheticWindField::GenConfig wind;
  wind::NoiseParams noise;
  fompc::FompcConfig fompc;
};

// One row per control step, captured at decision time.
struct TrajectoryRow {
  int step = 0;
  double t = 0.0;
  double x = 0.0, y = 0.0, l = 0.0, n = 0.0, T = 0.0, E = 0.0, V = 0.0,
         p_env = 0.0;
  double u = 0.0;  // gated action applied at this step
  bool gate = false;
};

struct EpisodeMetrics {
  double twr = 0.0;
  double reward = 0.0;
  int violations = 0;
  double mean_step_time = 0.0;  // s of agent decision time per control step
  int clamp_events = 0;         // substeps where a state bound clamped
  bool failed = false;
  std::string failure;
  std::uint64_t wind_fingerprint = 0;
  std::vector<TrajectoryRow> trajectory;
  std::vector<fompc::PlannerDiagnostics> replans;
};

// Initial state at float equilibrium: uniform distance/bearing from the
// station, pressure uniform in the mid band, ballonet solved for float,
// battery half-to-full. Also draws the episode's local solar offset.
BalloonState sample_initial_state(std::uint64_t seed, const EpisodeConfig& cfg,
                                  SolarConfig* solar_out = nullptr);

// Fraction of control steps with the balloon inside the radius (boundary
// inclusive), evaluated at the decision-time states.
double time_within_radius(std::span<const TrajectoryRow> rows, double radius);

// Stand-in shaped reward: 1 inside the radius, exponential drop-off outside
// (0.4 * 2^-(d - radius)/100 km), scaled by 0.95 on power-gated steps.
double reward_episode(std::span<const TrajectoryRow> rows, double radius);

// Hash of wind-field and noise evaluations on a fixed probe grid; identical
// for every agent run on the same seed and wind config.
std::uint64_t wind_fingerprint(const wind::SyntheticWindField& field,
                               const wind::NoiseField& noise);

struct RunOptions {
  bool keep_trajectory = true;
};

EpisodeMetrics run_episode(Agent& agent, const EpisodeConfig& cfg,
                           const RunOptions& opts = {});

}  // namespace hab::harness

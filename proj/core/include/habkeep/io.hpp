#pragma once

#include <optional>
#include <string>

#include "habkeep/benchmark.hpp"
#include "habkeep/config.hpp"
#include "habkeep/episode.hpp"

namespace hab::harness {

// --- per-episode outputs ---------------------------------------------------

void write_episode_json(const std::string& path, const std::string& agent,
                        const EpisodeMetrics& metrics, const RunConfig& cfg);

// Trajectory CSV: '# meta {json}' header line carrying seed/agent/config
// fingerprint and wind settings, then one row per control step.
void write_trajectory_csv(const std::string& path, const std::string& agent,
                          std::uint64_t seed, const EpisodeMetrics& metrics,
                          const RunConfig& cfg);

struct LoadedTrajectory {
  std::vector<TrajectoryRow> rows;
  std::uint64_t seed = 0;
  std::string agent;
  double radius = 50e3;
  std::optional<RunConfig> config;  // present when the meta line parses
};

LoadedTrajectory read_trajectory_csv(const std::string& path);

// --- benchmark outputs -----------------------------------------------------

// summary.csv: deterministic metrics only (twr/reward/violations), fixed
// %.17g formatting, rows sorted by agent then seed. timing.csv: wall-time
// statistics, kept separate so summary.csv is byte-stable across reruns.
void write_summary_csv(const std::string& path, const BenchmarkResult& result);
void write_timing_csv(const std::string& path, const BenchmarkResult& result);
void write_summary_json(const std::string& path, const BenchmarkResult& result);
BenchmarkResult read_summary_json(const std::string& path);

// --- wind field dump -------------------------------------------------------

struct WindGridSpec {
  double x_min = -150e3, x_max = 150e3;
  int x_count = 7;
  double y_min = -150e3, y_max = 150e3;
  int y_count = 7;
  double l_min = 5200.0, l_max = 6900.0;
  int l_count = 18;
  double t_min = 0.0, t_max = 172800.0;
  int t_count = 5;
};

// CSV grid (x, y, l, t, u, v) of the forecast field, or of the truth field
// when a noise field is supplied.
void write_wind_grid_csv(const std::string& path,
                         const wind::SyntheticWindField& field,
                         const wind::NoiseField* noise,
                         const WindGridSpec& spec = {});

}  // namespace hab::harness

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "habkeep/episode.hpp"

namespace hab::harness {

struct MetricStats {
  double mean = 0.0;
  double ci = 0.0;  // 1.96 * sqrt(variance / n); 0 when n < 2
  int n = 0;
};

MetricStats summarize(std::span<const double> values);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  double twr = 0.0;
  double reward = 0.0;
  int violations = 0;
  double mean_step_time = 0.0;
  bool failed = false;
  std::string failure;
  std::uint64_t wind_fingerprint = 0;
};

struct AgentSummary {
  std::string agent;
  std::vector<EpisodeRecord> episodes;  // sorted by seed
  MetricStats twr, reward, violations, step_time;
  int failed = 0;
};

struct BenchmarkResult {
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 0;
  std::uint64_t config_fingerprint = 0;
  std::vector<AgentSummary> agents;
};

// Recomputes the per-agent statistics from the episode records (used both
// after a run and after re-loading a summary from disk).
void refresh_stats(AgentSummary& summary);

struct BenchmarkOptions {
  std::vector<std::string> agents{"fompc", "greedy-column", "coast"};
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 200;
  int workers = 1;
  EpisodeConfig episode;  // template; the seed field is overridden per run
  std::uint64_t config_fingerprint = 0;
  // optional streaming hook, called from worker threads under a lock
  std::function<void(const std::string& agent, const EpisodeMetrics&)> on_episode;
};

// Every agent runs the same seeds; episodes are independent tasks over a
// worker pool and aggregation is order-independent.
BenchmarkResult run_benchmark(const BenchmarkOptions& options);

enum class AblationDimension { kHorizon, kReplan, kInits, kFidelity, kWindModel };

AblationDimension ablation_dimension_from_name(const std::string& name);
const char* ablation_dimension_name(AblationDimension d);
std::vector<std::string> default_ablation_values(AblationDimension d);

// One benchmark per value, everything else held at the base configuration.
EpisodeConfig apply_ablation_value(EpisodeConfig base, AblationDimension d,
                                   const std::string& value);

struct AblationResult {
  AblationDimension dimension;
  std::vector<std::pair<std::string, BenchmarkResult>> runs;  // value -> result
};

AblationResult run_ablation(AblationDimension dimension,
                            std::span<const std::string> values,
                            const BenchmarkOptions& base);

}  // namespace hab::harness

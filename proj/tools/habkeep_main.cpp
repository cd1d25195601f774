// habkeep: station-keeping episodes, benchmarks and ablations for the
// synthetic high-altitude balloon environment.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "habkeep/agents.hpp"
#include "habkeep/benchmark.hpp"
#include "habkeep/config.hpp"
#include "habkeep/episode.hpp"
#include "habkeep/io.hpp"

namespace {

using namespace hab;
using namespace hab::harness;

constexpr int kExitFailedEpisode = 1;
constexpr int kExitConfigError = 2;

struct SeedRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 200;
};

SeedRange parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  SeedRange r;
  try {
    if (dots == std::string::npos) {
      r.begin = 0;
      r.end = std::stoull(text);
    } else {
      r.begin = std::stoull(text.substr(0, dots));
      r.end = std::stoull(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw ConfigError("bad seed range '" + text + "', expected A..B or N");
  }
  if (r.end <= r.begin) throw ConfigError("empty seed range '" + text + "'");
  return r;
}

RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  RunConfig cfg =
      config_path.empty() ? default_run_config() : load_config_file(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + kv + "' is not key=value");
    apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void print_summary(const BenchmarkResult& result) {
  std::printf("%-20s %10s %12s %12s %10s %8s\n", "agent", "twr", "reward",
              "violations", "s/step", "failed");
  for (const AgentSummary& a : result.agents) {
    std::printf("%-20s %5.2f%%+-%4.2f %8.1f+-%4.1f %8.2f+-%4.2f %10.4f %8d\n",
                a.agent.c_str(), 100.0 * a.twr.mean, 100.0 * a.twr.ci,
                a.reward.mean, a.reward.ci, a.violations.mean, a.violations.ci,
                a.step_time.mean, a.failed);
  }
}

int cmd_run(std::uint64_t seed, const std::string& agent_name,
            const RunConfig& cfg, const std::string& out_dir) {
  EpisodeConfig episode = cfg.episode;
  episode.seed = seed;
  const auto agent = make_agent(agent_name);
  const EpisodeMetrics metrics = run_episode(*agent, episode);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream base;
    base << agent_name << "_seed" << seed;
    const auto dir = std::filesystem::path(out_dir);
    write_episode_json((dir / (base.str() + ".json")).string(), agent_name,
                       metrics, cfg);
    write_trajectory_csv((dir / (base.str() + ".csv")).string(), agent_name,
                         seed, metrics, cfg);
  }

  if (metrics.failed) {
    std::cerr << "episode failed: " << metrics.failure << "\n";
    return kExitFailedEpisode;
  }
  std::printf("agent=%s seed=%llu twr=%.4f reward=%.2f violations=%d "
              "mean_step_time=%.4fs replans=%zu\n",
              agent_name.c_str(), static_cast<unsigned long long>(seed),
              metrics.twr, metrics.reward, metrics.violations,
              metrics.mean_step_time, metrics.replans.size());
  return 0;
}

int cmd_bench(const std::vector<std::string>& agents, const SeedRange& seeds,
              const RunConfig& cfg, int workers, const std::string& out_dir) {
  BenchmarkOptions opts;
  opts.agents = agents;
  opts.seed_begin = seeds.begin;
  opts.seed_end = seeds.end;
  opts.workers = workers > 0 ? workers : cfg.workers;
  opts.episode = cfg.episode;
  opts.config_fingerprint = config_fingerprint(cfg);

  const BenchmarkResult result = run_benchmark(opts);
  print_summary(result);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    write_summary_json((dir / "summary.json").string(), result);
    write_summary_csv((dir / "summary.csv").string(), result);
    write_timing_csv((dir / "timing.csv").string(), result);
    std::ofstream cfg_out(dir / "config.txt");
    cfg_out << canonical_config_text(cfg);
  }

  for (const AgentSummary& a : result.agents)
    if (a.failed > 0) return kExitFailedEpisode;
  return 0;
}

int cmd_ablate(const std::string& dimension_name,
               std::vector<std::string> values, const SeedRange& seeds,
               const RunConfig& cfg, int workers, const std::string& out_dir) {
  const AblationDimension dimension = ablation_dimension_from_name(dimension_name);
  if (values.empty()) values = default_ablation_values(dimension);

  BenchmarkOptions base;
  base.agents = {"fompc"};
  base.seed_begin = seeds.begin;
  base.seed_end = seeds.end;
  base.workers = workers > 0 ? workers : cfg.workers;
  base.episode = cfg.episode;
  base.config_fingerprint = config_fingerprint(cfg);

  const AblationResult result = run_ablation(dimension, values, base);

  bool any_failed = false;
  for (const auto& [value, run] : result.runs) {
    std::printf("--- %s = %s\n", dimension_name.c_str(), value.c_str());
    print_summary(run);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      const auto dir = std::filesystem::path(out_dir);
      write_summary_json(
          (dir / (dimension_name + "_" + value + ".json")).string(), run);
      write_summary_csv((dir / (dimension_name + "_" + value + ".csv")).string(),
                        run);
    }
    for (const AgentSummary& a : run.agents) any_failed |= a.failed > 0;
  }
  return any_failed ? kExitFailedEpisode : 0;
}

int cmd_replay(const std::string& trajectory_path, const std::string& grid_path) {
  const LoadedTrajectory loaded = read_trajectory_csv(trajectory_path);
  const double twr = time_within_radius(loaded.rows, loaded.radius);
  const double reward = reward_episode(loaded.rows, loaded.radius);
  int violations = 0;
  for (const TrajectoryRow& r : loaded.rows) violations += r.gate ? 1 : 0;
  std::printf("agent=%s seed=%llu steps=%zu twr=%.4f reward=%.2f violations=%d\n",
              loaded.agent.c_str(), static_cast<unsigned long long>(loaded.seed),
              loaded.rows.size(), twr, reward, violations);

  if (!grid_path.empty()) {
    if (!loaded.config.has_value())
      throw ConfigError("trajectory has no embedded config; cannot rebuild winds");
    const auto field = wind::SyntheticWindField::generate(
        loaded.seed, loaded.config->episode.wind);
    const auto noise =
        wind::NoiseField::generate(loaded.seed, loaded.config->episode.noise);
    write_wind_grid_csv(grid_path, field, &noise);
    std::printf("wind grid written to %s\n", grid_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Station-keeping benchmark harness for high-altitude balloons"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "inline config override key=value");

  // run
  auto* run = app.add_subcommand("run", "run one episode");
  std::uint64_t seed = 0;
  std::string agent = "fompc";
  std::string out_dir;
  run->add_option("--seed", seed, "episode seed");
  run->add_option("--agent", agent,
                  "fompc | discretized-fompc | alternating-fompc | "
                  "greedy-column | coast | pump");
  run->add_option("--out", out_dir, "directory for episode JSON and trajectory CSV");

  // bench
  auto* bench = app.add_subcommand("bench", "run agents over a seed range");
  std::vector<std::string> agents{"fompc", "greedy-column", "coast"};
  std::string seeds_text = "0..200";
  int workers = 0;
  std::string bench_out;
  bench->add_option("--agents", agents, "agents to evaluate")->delimiter(',');
  bench->add_option("--seeds", seeds_text, "seed range A..B (half-open) or N");
  bench->add_option("--workers", workers, "worker threads");
  bench->add_option("--out", bench_out, "output directory");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "vary one parameter, default grid");
  std::string dimension = "horizon";
  std::vector<std::string> values;
  std::string ablate_seeds = "0..200";
  int ablate_workers = 0;
  std::string ablate_out;
  ablate->add_option("--dimension", dimension,
                     "horizon | replan | inits | fidelity | wind-model");
  ablate->add_option("--values", values, "grid values (defaults per dimension)")
      ->delimiter(',');
  ablate->add_option("--seeds", ablate_seeds, "seed range A..B or N");
  ablate->add_option("--workers", ablate_workers, "worker threads");
  ablate->add_option("--out", ablate_out, "output directory");

  // replay
  auto* replay = app.add_subcommand("replay", "recompute stats from a trajectory");
  std::string trajectory_path;
  std::string grid_path;
  replay->add_option("--trajectory", trajectory_path, "trajectory CSV")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--wind-grid", grid_path,
                     "also dump the episode's wind field as a CSV grid");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = load_run_config(config_path, overrides);
    if (run->parsed()) return cmd_run(seed, agent, cfg, out_dir);
    if (bench->parsed())
      return cmd_bench(agents, parse_seed_range(seeds_text), cfg, workers,
                       bench_out);
    if (ablate->parsed())
      return cmd_ablate(dimension, values, parse_seed_range(ablate_seeds), cfg,
                        ablate_workers, ablate_out);
    if (replay->parsed()) return cmd_replay(trajectory_path, grid_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedEpisode;
  }
  return 0;
}

#include "habkeep/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "habkeep/wind_model.hpp"

namespace hab::harness {

MetricStats summarize(std::span<const double> values) {
  MetricStats s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n < 2) return s;  // CI guarded to zero width for a single trial
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  const double variance = sq / (s.n - 1);
  s.ci = 1.96 * std::sqrt(variance / s.n);
  return s;
}

void refresh_stats(AgentSummary& summary) {
  std::vector<double> twr, reward, violations, step_time;
  summary.failed = 0;
  for (const EpisodeRecord& e : summary.episodes) {
    if (e.failed) {
      ++summary.failed;
      continue;
    }
    twr.push_back(e.twr);
    reward.push_back(e.reward);
    violations.push_back(static_cast<double>(e.violations));
    step_time.push_back(e.mean_step_time);
  }
  summary.twr = summarize(twr);
  summary.reward = summarize(reward);
  summary.violations = summarize(violations);
  summary.step_time = summarize(step_time);
}

BenchmarkResult run_benchmark(const BenchmarkOptions& options) {
  if (options.seed_end <= options.seed_begin)
    throw std::invalid_argument("run_benchmark: empty seed range");
  if (options.agents.empty())
    throw std::invalid_argument("run_benchmark: no agents");

  const std::size_t seeds = options.seed_end - options.seed_begin;
  BenchmarkResult result;
  result.seed_begin = options.seed_begin;
  result.seed_end = options.seed_end;
  result.config_fingerprint = options.config_fingerprint;
  result.agents.resize(options.agents.size());
  for (std::size_t a = 0; a < options.agents.size(); ++a) {
    result.agents[a].agent = options.agents[a];
    result.agents[a].episodes.resize(seeds);
  }

  struct Task {
    std::size_t agent;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(options.agents.size() * seeds);
  for (std::size_t a = 0; a < options.agents.size(); ++a)
    for (std::uint64_t s = options.seed_begin; s < options.seed_end; ++s)
      tasks.push_back({a, s});

  std::atomic<std::size_t> next{0};
  std::mutex hook_mutex;
  const int workers =
      std::max(1, std::min(options.workers, static_cast<int>(tasks.size())));

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      EpisodeConfig cfg = options.episode;
      cfg.seed = task.seed;
      const auto agent = make_agent(options.agents[task.agent]);
      RunOptions run_opts;
      run_opts.keep_trajectory = false;
      const EpisodeMetrics m = run_episode(*agent, cfg, run_opts);

      EpisodeRecord rec;
      rec.seed = task.seed;
      rec.twr = m.twr;
      rec.reward = m.reward;
      rec.violations = m.violations;
      rec.mean_step_time = m.mean_step_time;
      rec.failed = m.failed;
      rec.failure = m.failure;
      rec.wind_fingerprint = m.wind_fingerprint;
      result.agents[task.agent]
          .episodes[task.seed - options.seed_begin] = std::move(rec);
      if (options.on_episode) {
        const std::lock_guard<std::mutex> lock(hook_mutex);
        options.on_episode(options.agents[task.agent], m);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (AgentSummary& a : result.agents) refresh_stats(a);
  return result;
}

AblationDimension ablation_dimension_from_name(const std::string& name) {
  if (name == "horizon") return AblationDimension::kHorizon;
  if (name == "replan") return AblationDimension::kReplan;
  if (name == "inits") return AblationDimension::kInits;
  if (name == "fidelity") return AblationDimension::kFidelity;
  if (name == "wind-model") return AblationDimension::kWindModel;
  throw std::invalid_argument("unknown ablation dimension: " + name);
}

const char* ablation_dimension_name(AblationDimension d) {
  switch (d) {
    case AblationDimension::kHorizon: return "horizon";
    case AblationDimension::kReplan: return "replan";
    case AblationDimension::kInits: return "inits";
    case AblationDimension::kFidelity: return "fidelity";
    case AblationDimension::kWindModel: return "wind-model";
  }
  return "?";
}

std::vector<std::string> default_ablation_values(AblationDimension d) {
  switch (d) {
    case AblationDimension::kHorizon: return {"30", "60", "120", "240", "480"};
    case AblationDimension::kReplan: return {"192", "96", "48", "24", "12"};
    case AblationDimension::kInits: return {"1", "5", "25", "100", "250"};
    case AblationDimension::kFidelity: return {"0", "1", "2", "3", "4"};
    case AblationDimension::kWindModel:
      return {"forecast", "column", "gp-column", "blend"};
  }
  return {};
}

EpisodeConfig apply_ablation_value(EpisodeConfig base, AblationDimension d,
                                   const std::string& value) {
  switch (d) {
    case AblationDimension::kHorizon:
      base.fompc.horizon = std::stoi(value);
      base.fompc.replan_interval =
          std::min(base.fompc.replan_interval, base.fompc.horizon);
      break;
    case AblationDimension::kReplan:
      base.fompc.replan_interval = std::stoi(value);
      break;
    case AblationDimension::kInits:
      base.fompc.num_inits = std::stoi(value);
      break;
    case AblationDimension::kFidelity:
      base.fompc.fidelity = static_cast<Fidelity>(std::stoi(value));
      break;
    case AblationDimension::kWindModel:
      base.fompc.wind_model.kind = wind::wind_model_from_name(value);
      break;
  }
  base.fompc.validate();
  return base;
}

AblationResult run_ablation(AblationDimension dimension,
                            std::span<const std::string> values,
                            const BenchmarkOptions& base) {
  AblationResult out;
  out.dimension = dimension;
  for (const std::string& value : values) {
    BenchmarkOptions opts = base;
    opts.episode = apply_ablation_value(base.episode, dimension, value);
    out.runs.emplace_back(value, run_benchmark(opts));
  }
  return out;
}

}  // namespace hab::harness

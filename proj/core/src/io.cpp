#include "habkeep/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hab::harness {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

json diagnostics_json(const std::vector<fompc::PlannerDiagnostics>& replans) {
  json arr = json::array();
  for (const auto& d : replans) {
    arr.push_back({{"init", static_cast<int>(d.chosen_init)},
                   {"init_index", d.chosen_index},
                   {"init_cost", d.init_cost},
                   {"final_cost", d.final_cost},
                   {"iterations", d.iterations},
                   {"exit_grad_norm", d.exit_grad_norm},
                   {"wall_time_s", d.wall_time_s},
                   {"aborted", d.aborted_nonfinite}});
  }
  return arr;
}

}  // namespace

void write_episode_json(const std::string& path, const std::string& agent,
                        const EpisodeMetrics& metrics, const RunConfig& cfg) {
  json j{{"agent", agent},
         {"seed", cfg.episode.seed},
         {"config_fingerprint", config_fingerprint(cfg)},
         {"wind_fingerprint", metrics.wind_fingerprint},
         {"twr", metrics.twr},
         {"reward", metrics.reward},
         {"violations", metrics.violations},
         {"mean_step_time", metrics.mean_step_time},
         {"clamp_events", metrics.clamp_events},
         {"failed", metrics.failed},
         {"replans", diagnostics_json(metrics.replans)}};
  if (metrics.failed) j["failure"] = metrics.failure;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const std::string& agent,
                          std::uint64_t seed, const EpisodeMetrics& metrics,
                          const RunConfig& cfg) {
  auto out = open_out(path);
  json meta{{"agent", agent},
            {"seed", seed},
            {"radius", cfg.episode.radius},
            {"config_fingerprint", config_fingerprint(cfg)},
            {"config", canonical_config_text(cfg)}};
  out << "# meta " << meta.dump() << "\n";
  out << "step,t,x,y,l,n,T,E,V,p_env,u,gate\n";
  for (const TrajectoryRow& r : metrics.trajectory) {
    out << r.step << ',' << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.y) << ','
        << fmt(r.l) << ',' << fmt(r.n) << ',' << fmt(r.T) << ',' << fmt(r.E)
        << ',' << fmt(r.V) << ',' << fmt(r.p_env) << ',' << fmt(r.u) << ','
        << (r.gate ? 1 : 0) << "\n";
  }
}

LoadedTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);
  LoadedTrajectory out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# meta ", 0) == 0) {
      const json meta = json::parse(line.substr(7));
      out.seed = meta.value("seed", std::uint64_t{0});
      out.agent = meta.value("agent", "");
      out.radius = meta.value("radius", 50e3);
      if (meta.contains("config")) {
        RunConfig cfg = default_run_config();
        apply_config_text(cfg, meta["config"].get<std::string>());
        out.config = cfg;
      }
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen && line.rfind("step,", 0) == 0) {
      header_seen = true;
      continue;
    }
    TrajectoryRow r;
    int gate = 0;
    if (std::sscanf(line.c_str(),
                    "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d", &r.step,
                    &r.t, &r.x, &r.y, &r.l, &r.n, &r.T, &r.E, &r.V, &r.p_env,
                    &r.u, &gate) != 12)
      throw std::runtime_error("trajectory: malformed row: " + line);
    r.gate = gate != 0;
    out.rows.push_back(r);
  }
  return out;
}

void write_summary_csv(const std::string& path, const BenchmarkResult& result) {
  auto out = open_out(path);
  out << "# config_fingerprint=" << result.config_fingerprint
      << " seeds=" << result.seed_begin << ".." << result.seed_end << "\n";
  out << "agent,n,failed,twr_mean,twr_ci,reward_mean,reward_ci,"
         "violations_mean,violations_ci\n";
  for (const AgentSummary& a : result.agents) {
    out << a.agent << ',' << a.twr.n << ',' << a.failed << ',' << fmt(a.twr.mean)
        << ',' << fmt(a.twr.ci) << ',' << fmt(a.reward.mean) << ','
        << fmt(a.reward.ci) << ',' << fmt(a.violations.mean) << ','
        << fmt(a.violations.ci) << "\n";
  }
}

void write_timing_csv(const std::string& path, const BenchmarkResult& result) {
  auto out = open_out(path);
  out << "agent,step_time_mean,step_time_ci\n";
  for (const AgentSummary& a : result.agents)
    out << a.agent << ',' << fmt(a.step_time.mean) << ',' << fmt(a.step_time.ci)
        << "\n";
}

void write_summary_json(const std::string& path, const BenchmarkResult& result) {
  json agents = json::array();
  for (const AgentSummary& a : result.agents) {
    json episodes = json::array();
    for (const EpisodeRecord& e : a.episodes) {
      json row{{"seed", e.seed},
               {"twr", e.twr},
               {"reward", e.reward},
               {"violations", e.violations},
               {"mean_step_time", e.mean_step_time},
               {"wind_fingerprint", e.wind_fingerprint},
               {"failed", e.failed}};
      if (e.failed) row["failure"] = e.failure;
      episodes.push_back(std::move(row));
    }
    agents.push_back({{"agent", a.agent},
                      {"failed", a.failed},
                      {"twr", {{"mean", a.twr.mean}, {"ci", a.twr.ci}, {"n", a.twr.n}}},
                      {"reward",
                       {{"mean", a.reward.mean}, {"ci", a.reward.ci}, {"n", a.reward.n}}},
                      {"violations",
                       {{"mean", a.violations.mean},
                        {"ci", a.violations.ci},
                        {"n", a.violations.n}}},
                      {"step_time",
                       {{"mean", a.step_time.mean},
                        {"ci", a.step_time.ci},
                        {"n", a.step_time.n}}},
                      {"episodes", std::move(episodes)}});
  }
  json j{{"seed_begin", result.seed_begin},
         {"seed_end", result.seed_end},
         {"config_fingerprint", result.config_fingerprint},
         {"agents", std::move(agents)}};
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

BenchmarkResult read_summary_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary: " + path);
  const json j = json::parse(in);
  BenchmarkResult result;
  result.seed_begin = j.at("seed_begin").get<std::uint64_t>();
  result.seed_end = j.at("seed_end").get<std::uint64_t>();
  result.config_fingerprint = j.at("config_fingerprint").get<std::uint64_t>();
  for (const json& a : j.at("agents")) {
    AgentSummary s;
    s.agent = a.at("agent").get<std::string>();
    for (const json& e : a.at("episodes")) {
      EpisodeRecord rec;
      rec.seed = e.at("seed").get<std::uint64_t>();
      rec.twr = e.at("twr").get<double>();
      rec.reward = e.at("reward").get<double>();
      rec.violations = e.at("violations").get<int>();
      rec.mean_step_time = e.at("mean_step_time").get<double>();
      rec.wind_fingerprint = e.at("wind_fingerprint").get<std::uint64_t>();
      rec.failed = e.at("failed").get<bool>();
      if (rec.failed) rec.failure = e.value("failure", "");
      s.episodes.push_back(std::move(rec));
    }
    refresh_stats(s);
    result.agents.push_back(std::move(s));
  }
  return result;
}

void write_wind_grid_csv(const std::string& path,
                         const wind::SyntheticWindField& field,
                         const wind::NoiseField* noise, const WindGridSpec& spec) {
  auto out = open_out(path);
  out << "x,y,l,t,u,v\n";
  const auto axis = [](double lo, double hi, int count, int i) {
    return count < 2 ? lo : lo + (hi - lo) * i / (count - 1);
  };
  for (int it = 0; it < spec.t_count; ++it)
    for (int il = 0; il < spec.l_count; ++il)
      for (int iy = 0; iy < spec.y_count; ++iy)
        for (int ix = 0; ix < spec.x_count; ++ix) {
          const double x = axis(spec.x_min, spec.x_max, spec.x_count, ix);
          const double y = axis(spec.y_min, spec.y_max, spec.y_count, iy);
          const double l = axis(spec.l_min, spec.l_max, spec.l_count, il);
          const double t = axis(spec.t_min, spec.t_max, spec.t_count, it);
          wind::WindVector w = field.at(x, y, l, t);
          if (noise) {
            const wind::WindVector b = noise->at(x, y, l, t);
            w.u_east += b.u_east;
            w.v_north += b.v_north;
          }
          out << fmt(x) << ',' << fmt(y) << ',' << fmt(l) << ',' << fmt(t) << ','
              << fmt(w.u_east) << ',' << fmt(w.v_north) << "\n";
        }
}

}  // namespace hab::harness

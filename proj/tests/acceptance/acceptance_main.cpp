// Acceptance suite: runs every criterion end to end and prints one
// PASS/FAIL line per criterion. Exit code 0 iff everything passed.
//
// Environment knobs (defaults in parentheses):
//   HAB_ACCEPT_SEEDS    number of benchmark seeds (200)
//   HAB_ACCEPT_WORKERS  worker threads for benchmarks (hardware concurrency)
//   HAB_ACCEPT_CACHE    directory for cached benchmark results (unset: off)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "habkeep/atmosphere.hpp"
#include "habkeep/benchmark.hpp"
#include "habkeep/config.hpp"
#include "habkeep/dynamics.hpp"
#include "habkeep/fompc.hpp"
#include "habkeep/io.hpp"
#include "habkeep/rng.hpp"
#include "habkeep/rollout.hpp"

using namespace hab;
using namespace hab::harness;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << detail << "\n";
  std::cout.flush();
  if (!pass) ++g_failures;
}

int env_int(const char* name, int fallback) {
  const char* v = std::getenv(name);
  return v ? std::atoi(v) : fallback;
}

std::string fmt_pct(double frac) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << 100.0 * frac << "%";
  return os.str();
}

struct Runner {
  int seeds;
  int workers;
  std::string cache_dir;

  BenchmarkResult run(const std::string& label, const EpisodeConfig& episode,
                      const std::vector<std::string>& agents) const {
    RunConfig rc;
    rc.episode = episode;
    const std::uint64_t fp = config_fingerprint(rc);

    std::string cache_path;
    if (!cache_dir.empty()) {
      std::ostringstream name;
      name << label << "_" << std::hex << fp << std::dec << "_" << seeds << ".json";
      cache_path = (std::filesystem::path(cache_dir) / name.str()).string();
      if (std::filesystem::exists(cache_path)) {
        std::cerr << "  [cache] " << label << " <- " << cache_path << "\n";
        return read_summary_json(cache_path);
      }
    }

    BenchmarkOptions opts;
    opts.agents = agents;
    opts.seed_begin = 0;
    opts.seed_end = static_cast<std::uint64_t>(seeds);
    opts.workers = workers;
    opts.episode = episode;
    opts.config_fingerprint = fp;

    std::cerr << "  [run] " << label << ": agents=" << agents.size()
              << " seeds=" << seeds << " workers=" << workers << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    const BenchmarkResult result = run_benchmark(opts);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cerr << "  [run] " << label << " done in " << dt << " s\n";

    if (!cache_path.empty()) {
      std::filesystem::create_directories(cache_dir);
      write_summary_json(cache_path, result);
    }
    return result;
  }
};

const AgentSummary& agent_of(const BenchmarkResult& r, const std::string& name) {
  for (const AgentSummary& a : r.agents)
    if (a.agent == name) return a;
  throw std::runtime_error("agent missing from benchmark: " + name);
}

// --- criterion 1: gradient correctness --------------------------------------

void criterion_gradient(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const BalloonParams params;
  const dyn::SurrogateRates surrogate = dyn::calibrate_surrogate_rates(params);
  const auto [band_lo, band_hi] = params.pressure_band();

  const auto check_instances = [&](int count, int horizon) {
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      SplitMix64 rng = substream(static_cast<std::uint64_t>(i), "accept-grad");
      const auto field =
          wind::SyntheticWindField::generate(static_cast<std::uint64_t>(i));

      BalloonState x0;
      x0.x = rng.uniform(-60e3, 60e3);
      x0.y = rng.uniform(-60e3, 60e3);
      x0.l = rng.uniform(band_lo + 100.0, band_hi - 100.0);
      x0.n = params.float_ballonet(x0.l) + rng.uniform(-20.0, 20.0);
      x0.T = atmo::ambient_temperature(x0.l) + rng.uniform(-2.0, 8.0);
      x0.E = rng.uniform(0.3, 1.0) * params.E_max;
      dyn::volume_superpressure(x0.l, x0.n, x0.T, params, x0.V, x0.p_env);
      x0.t = rng.uniform(0.0, 86400.0);

      std::vector<wind::WindObservation> obs;
      const int n_obs = 5 + static_cast<int>(rng.next_below(40));
      for (int k = 0; k < n_obs; ++k)
        obs.push_back({x0.x + rng.uniform(-4e4, 4e4),
                       x0.y + rng.uniform(-4e4, 4e4),
                       rng.uniform(band_lo, band_hi), x0.t - 180.0 * k,
                       {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
      const auto gp = wind::GpForecastCorrector::fit(obs, wind::GpConfig{});

      const wind::WindModelConfig model{wind::WindModelKind::kGpColumn, 0.5};
      const wind::PlannerWindModel wm(model, field, &gp, x0.x, x0.y, x0.t);

      difftrace::RolloutConfig rc;
      rc.step.fidelity = Fidelity::kPhi4;
      rc.step.acs = AcsMode::kSurrogate;
      rc.step.surrogate = surrogate;
      rc.step.solar.local_offset_hours = rng.uniform(0.0, 24.0);

      std::vector<double> raw(static_cast<std::size_t>(horizon));
      for (double& r : raw) r = rng.uniform(-2.0, 2.0);

      const auto rep = difftrace::grad_rollout(raw, x0, wm, params, rc);
      const double h = 1e-4;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        const double saved = raw[k];
        raw[k] = saved + h;
        const double jp = difftrace::value_rollout(raw, x0, wm, params, rc);
        raw[k] = saved - h;
        const double jm = difftrace::value_rollout(raw, x0, wm, params, rc);
        raw[k] = saved;
        const double fd = (jp - jm) / (2.0 * h);
        worst = std::max(worst, std::abs(rep.gradient[k] - fd) /
                                    (1.0 + std::abs(rep.gradient[k])));
      }
    }
    return worst;
  };

  const double worst16 = check_instances(100, 16);
  const double worst240 = check_instances(3, 240);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream os;
  os << "gradient vs central FD: max rel err " << worst16 << " (H=16, <=1e-4), "
     << worst240 << " (H=240, <=1e-3), " << elapsed << " s (<=300)";
  report(1, worst16 <= 1e-4 && worst240 <= 1e-3 && elapsed <= 300.0, os.str());
}

// --- criterion 2: vertical-balance residual ---------------------------------

void criterion_residual(int) {
  const BalloonParams p;
  SplitMix64 rng(424242);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    BalloonState s;
    s.l = rng.uniform(5100.0, 9000.0);
    s.n = rng.uniform(0.0, p.n_max);
    s.T = rng.uniform(200.0, 245.0);
    s.V = rng.uniform(500.0, 900.0);
    const double hdot = dyn::vertical_velocity(s, p);
    const double rho = atmo::air_density(s.l, atmo::ambient_temperature(s.l));
    const double residual = rho * s.V * p.gravity - p.total_mass(s.n) * p.gravity -
                            0.5 * rho * p.C_d * p.area * std::abs(hdot) * hdot;
    worst = std::max(worst, std::abs(residual));
  }
  std::ostringstream os;
  os << "steady-state solve residual " << worst << " N over 1e4 states (<1e-9)";
  report(2, worst < 1e-9, os.str());
}

// --- criterion 3: atmosphere table ------------------------------------------

void criterion_atmosphere(int) {
  bool ok = true;
  std::ostringstream os;
  ok &= atmo::pressure_at_altitude(0.0) == 101325.0;
  ok &= std::abs(atmo::ambient_temperature(101325.0) - 288.15) < 1e-9;
  ok &= std::abs(atmo::air_density(101325.0, 288.15) - 1.225) < 1e-3;
  ok &= std::abs(atmo::pressure_at_altitude(11000.0) - 22632.0) < 1.0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double h = 40000.0 * i / 999.0;
    worst = std::max(
        worst, std::abs(atmo::altitude_at_pressure(atmo::pressure_at_altitude(h)) - h));
  }
  ok &= worst < 0.01;
  os << "sea level 101325 Pa / 288.15 K / 1.225 kg/m3, 11 km -> "
     << atmo::pressure_at_altitude(11000.0) << " Pa, round-trip worst " << worst
     << " m (<0.01)";
  report(3, ok, os.str());
}

// --- criterion 4: Algorithm 1 trace fidelity --------------------------------

void criterion_trace(int) {
  const BalloonParams params;
  const auto field = wind::SyntheticWindField::generate(4242);
  const auto [band_lo, band_hi] = params.pressure_band();

  BalloonState x0;
  x0.x = 18e3;
  x0.y = -22e3;
  x0.l = 0.5 * (band_lo + band_hi);
  x0.n = params.float_ballonet(x0.l);
  x0.T = atmo::ambient_temperature(x0.l);
  x0.E = 0.75 * params.E_max;
  dyn::volume_superpressure(x0.l, x0.n, x0.T, params, x0.V, x0.p_env);

  std::vector<wind::WindObservation> obs;
  SplitMix64 rng(17);
  for (int i = 0; i < 20; ++i)
    obs.push_back({x0.x + rng.uniform(-3e4, 3e4), x0.y + rng.uniform(-3e4, 3e4),
                   rng.uniform(band_lo, band_hi), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  const auto gp = wind::GpForecastCorrector::fit(obs, wind::GpConfig{});
  const wind::WindModelConfig model{wind::WindModelKind::kGpColumn, 0.5};
  const wind::PlannerWindModel wm(model, field, &gp, x0.x, x0.y, x0.t);

  difftrace::RolloutConfig rc;
  rc.step.acs = AcsMode::kSurrogate;
  rc.step.surrogate = dyn::calibrate_surrogate_rates(params);

  fompc::FompcConfig cfg;
  cfg.horizon = 24;
  cfg.max_iters = 5;
  cfg.step_size = 1.0;  // eta = 1

  fompc::ControlPlan init;
  init.raw.assign(24, 0.0);
  SplitMix64 rng2(5);
  for (double& r : init.raw) r = rng2.uniform(-1.5, 1.5);

  const fompc::Objective objective = [&](std::span<const double> raw) {
    const auto rep = difftrace::grad_rollout(raw, x0, wm, params, rc);
    return fompc::ObjectiveEval{rep.value, rep.gradient};
  };
  const auto res = fompc::optimize(init, objective, cfg,
                                   fompc::OptimizeMode::kTraceExact, true);

  bool ok = res.trace.size() == 5;
  std::vector<double> raw = init.raw;
  for (int s = 0; ok && s < 5; ++s) {
    const auto rep = difftrace::grad_rollout(raw, x0, wm, params, rc);
    double sq = 0.0;
    for (double g : rep.gradient) sq += g * g;
    const double norm = std::sqrt(sq);
    for (std::size_t k = 0; k < raw.size(); ++k)
      raw[k] -= cfg.step_size * (rep.gradient[k] / norm);
    for (std::size_t k = 0; k < raw.size(); ++k)
      if (res.trace[static_cast<std::size_t>(s)][k] != raw[k]) ok = false;
  }
  report(4, ok, "5 hand-stepped normalized-GD iterations match bit-for-bit");
}

// --- criteria 5/7/8/9: default benchmark ------------------------------------

void criterion_ordering(const BenchmarkResult& main_run) {
  const AgentSummary& fompc = agent_of(main_run, "fompc");
  const AgentSummary& greedy = agent_of(main_run, "greedy-column");
  const AgentSummary& coast = agent_of(main_run, "coast");

  const bool gap_greedy = fompc.twr.mean >= greedy.twr.mean + 0.05;
  const bool gap_coast = fompc.twr.mean >= coast.twr.mean + 0.15;
  const bool ci_greedy =
      fompc.twr.mean - fompc.twr.ci > greedy.twr.mean + greedy.twr.ci;
  const bool ci_coast =
      fompc.twr.mean - fompc.twr.ci > coast.twr.mean + coast.twr.ci;

  std::ostringstream os;
  os << "TWR fompc " << fmt_pct(fompc.twr.mean) << " +/- " << fmt_pct(fompc.twr.ci)
     << ", greedy " << fmt_pct(greedy.twr.mean) << " +/- " << fmt_pct(greedy.twr.ci)
     << ", coast " << fmt_pct(coast.twr.mean) << " +/- " << fmt_pct(coast.twr.ci)
     << " (needs >= greedy+5pts, >= coast+15pts, CIs disjoint)";
  report(5, gap_greedy && gap_coast && ci_greedy && ci_coast, os.str());
}

void criterion_rediscretization(const BenchmarkResult& main_run) {
  const AgentSummary& fompc = agent_of(main_run, "fompc");
  const AgentSummary& disc = agent_of(main_run, "discretized-fompc");
  const double gap = std::abs(fompc.twr.mean - disc.twr.mean);
  std::ostringstream os;
  os << "TWR continuous " << fmt_pct(fompc.twr.mean) << " vs discretized "
     << fmt_pct(disc.twr.mean) << ", gap " << fmt_pct(gap) << " (<= 3 pts)";
  report(7, gap <= 0.03, os.str());
}

void criterion_timing(const BenchmarkResult& main_run, int replan_interval) {
  const AgentSummary& fompc = agent_of(main_run, "fompc");
  const double per_step = fompc.step_time.mean;
  const double per_replan = per_step * replan_interval;
  const double interval_s = replan_interval * 180.0;
  std::ostringstream os;
  os << "mean decision time " << per_step << " s/step (<= 1.0), "
     << per_replan << " s/replan vs " << interval_s << " s interval";
  report(8, per_step <= 1.0 && per_replan < 0.1 * interval_s, os.str());
}

void criterion_power_safety(const BenchmarkResult& main_run) {
  const AgentSummary& fompc = agent_of(main_run, "fompc");
  const AgentSummary& pump = agent_of(main_run, "pump");

  // directed hysteresis check
  bool gate_ok = true;
  GateResult g = power_gate(0.02, 1.0, -1.0, false);
  gate_ok &= g.latched && g.u == 0.0;
  g = power_gate(0.04, 1.0, -1.0, true);
  gate_ok &= g.latched;
  g = power_gate(0.05, 1.0, -1.0, true);
  gate_ok &= g.latched;  // release requires strictly above 0.05
  g = power_gate(0.0501, 1.0, -1.0, true);
  gate_ok &= !g.latched;

  std::ostringstream os;
  os << "mean violations fompc " << fompc.violations.mean << " < pump "
     << pump.violations.mean << "; hysteresis releases only above 0.05 "
     << (gate_ok ? "(ok)" : "(broken)");
  report(9, fompc.violations.mean < pump.violations.mean && gate_ok, os.str());
}

// --- criterion 6: ablation direction checks ---------------------------------

void criterion_ablations(const BenchmarkResult& main_run,
                         const BenchmarkResult& inits1,
                         const BenchmarkResult& inits25,
                         const BenchmarkResult& replan192,
                         const BenchmarkResult& phi0,
                         const BenchmarkResult& psi1_bias,
                         const BenchmarkResult& psi2_bias) {
  const auto twr = [](const BenchmarkResult& r) {
    return agent_of(r, "fompc").twr;
  };
  const MetricStats def = twr(main_run);

  // "one CI width" allowance: the full width of the 95 % interval of the
  // comparison side, i.e. 2 * 1.96 * sqrt(var/n)
  const auto within = [](const MetricStats& lhs, const MetricStats& rhs) {
    return lhs.mean >= rhs.mean - 2.0 * rhs.ci;
  };

  const MetricStats i1 = twr(inits1);
  const MetricStats i25 = twr(inits25);
  const bool a = within(i25, i1);

  const MetricStats m192 = twr(replan192);
  const bool b = within(def, m192);  // m=24 is the default

  const MetricStats f0 = twr(phi0);
  const bool c = within(def, f0);  // phi4 is the default

  const MetricStats p1 = twr(psi1_bias);
  const MetricStats p2 = twr(psi2_bias);
  const bool d = within(p2, p1);

  std::ostringstream os;
  os << "TWR inits25 " << fmt_pct(i25.mean) << " vs inits1 " << fmt_pct(i1.mean)
     << "+-" << fmt_pct(i1.ci) << " | m24 " << fmt_pct(def.mean) << " vs m192 "
     << fmt_pct(m192.mean) << "+-" << fmt_pct(m192.ci) << " | phi4 "
     << fmt_pct(def.mean) << " vs phi0 " << fmt_pct(f0.mean) << "+-"
     << fmt_pct(f0.ci) << " | biased-noise gp-column " << fmt_pct(p2.mean)
     << " vs column " << fmt_pct(p1.mean) << "+-" << fmt_pct(p1.ci)
     << " (each left side within one full CI width of the right)";
  report(6, a && b && c && d, os.str());
}

// --- criterion 10: benchmark determinism ------------------------------------

void criterion_determinism(const Runner& runner) {
  EpisodeConfig episode;  // defaults; fast agents only
  BenchmarkOptions opts;
  opts.agents = {"coast", "pump"};
  opts.seed_begin = 0;
  opts.seed_end = 6;
  opts.workers = runner.workers;
  opts.episode = episode;
  RunConfig rc;
  rc.episode = episode;
  opts.config_fingerprint = config_fingerprint(rc);

  const BenchmarkResult r1 = run_benchmark(opts);
  const BenchmarkResult r2 = run_benchmark(opts);

  const auto dir = std::filesystem::temp_directory_path() / "habkeep_accept";
  std::filesystem::create_directories(dir);
  const std::string p1 = (dir / "summary_run1.csv").string();
  const std::string p2 = (dir / "summary_run2.csv").string();
  write_summary_csv(p1, r1);
  write_summary_csv(p2, r2);

  const auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string a = slurp(p1);
  const std::string b = slurp(p2);
  report(10, !a.empty() && a == b,
         "bench run twice: summary CSV byte-identical (" +
             std::to_string(a.size()) + " bytes)");
}

}  // namespace

int main() {
  const int seeds = env_int("HAB_ACCEPT_SEEDS", 200);
  int workers = env_int("HAB_ACCEPT_WORKERS",
                        static_cast<int>(std::thread::hardware_concurrency()));
  if (workers < 1) workers = 1;
  const char* cache = std::getenv("HAB_ACCEPT_CACHE");

  Runner runner{seeds, workers, cache ? cache : ""};
  std::cerr << "acceptance: seeds=" << seeds << " workers=" << workers << "\n";

  criterion_gradient(1);
  criterion_residual(2);
  criterion_atmosphere(3);
  criterion_trace(4);

  EpisodeConfig episode;  // spec defaults
  const BenchmarkResult main_run =
      runner.run("default", episode,
                 {"fompc", "discretized-fompc", "greedy-column", "coast", "pump"});

  EpisodeConfig e_inits1 = episode;
  e_inits1.fompc.num_inits = 1;
  EpisodeConfig e_inits25 = episode;
  e_inits25.fompc.num_inits = 25;
  EpisodeConfig e_m192 = episode;
  e_m192.fompc.replan_interval = 192;
  EpisodeConfig e_phi0 = episode;
  e_phi0.fompc.fidelity = Fidelity::kPhi0;
  EpisodeConfig e_bias = episode;
  e_bias.noise.bias_min = 1.0;
  e_bias.noise.bias_max = 2.0;
  EpisodeConfig e_bias_col = e_bias;
  e_bias_col.fompc.wind_model.kind = wind::WindModelKind::kColumn;

  const BenchmarkResult r_inits1 = runner.run("inits1", e_inits1, {"fompc"});
  const BenchmarkResult r_inits25 = runner.run("inits25", e_inits25, {"fompc"});
  const BenchmarkResult r_m192 = runner.run("replan192", e_m192, {"fompc"});
  const BenchmarkResult r_phi0 = runner.run("phi0", e_phi0, {"fompc"});
  const BenchmarkResult r_psi1b = runner.run("psi1bias", e_bias_col, {"fompc"});
  const BenchmarkResult r_psi2b = runner.run("psi2bias", e_bias, {"fompc"});

  criterion_ordering(main_run);
  criterion_ablations(main_run, r_inits1, r_inits25, r_m192, r_phi0, r_psi1b,
                      r_psi2b);
  criterion_rediscretization(main_run);
  criterion_timing(main_run, episode.fompc.replan_interval);
  criterion_power_safety(main_run);
  criterion_determinism(runner);

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " CRITERIA FAILED")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}

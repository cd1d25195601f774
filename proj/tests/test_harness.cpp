#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "habkeep/benchmark.hpp"
#include "habkeep/config.hpp"
#include "habkeep/dynamics.hpp"
#include "habkeep/episode.hpp"
#include "habkeep/io.hpp"

using namespace hab;
using namespace hab::harness;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

EpisodeConfig fast_episode(std::uint64_t seed, int steps = 60) {
  EpisodeConfig cfg;
  cfg.seed = seed;
  cfg.steps = steps;
  cfg.fompc.horizon = 20;
  cfg.fompc.replan_interval = 5;
  cfg.fompc.num_inits = 4;
  cfg.fompc.max_iters = 5;
  return cfg;
}

}  // namespace

TEST_CASE("initial state sampler") {
  const EpisodeConfig cfg = fast_episode(0);
  const auto [band_lo, band_hi] = cfg.params.pressure_band();

  SUBCASE("deterministic per seed") {
    const BalloonState a = sample_initial_state(123, cfg);
    const BalloonState b = sample_initial_state(123, cfg);
    CHECK(a.x == b.x);
    CHECK(a.l == b.l);
    CHECK(a.E == b.E);
  }

  SUBCASE("all draws inside the advertised bounds") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const BalloonState s = sample_initial_state(seed, cfg);
      CHECK(std::hypot(s.x, s.y) <= 40e3);
      CHECK(s.l >= band_lo + 0.2 * (band_hi - band_lo) - 1e-9);
      CHECK(s.l <= band_hi - 0.2 * (band_hi - band_lo) + 1e-9);
      CHECK(s.E >= 0.5 * cfg.params.E_max);
      CHECK(s.E <= cfg.params.E_max);
    }
  }

  SUBCASE("sampled states float") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const BalloonState s = sample_initial_state(seed, cfg);
      CHECK(std::abs(dyn::vertical_velocity(s, cfg.params)) < 0.05);
    }
  }
}

TEST_CASE("twr counting") {
  std::vector<TrajectoryRow> rows(960);

  SUBCASE("pinned inside") {
    for (auto& r : rows) r.x = r.y = 1000.0;
    CHECK(time_within_radius(rows, 50e3) == 1.0);
  }

  SUBCASE("exactly half inside") {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].x = i < 480 ? 0.0 : 90e3;
      rows[i].y = 0.0;
    }
    CHECK(time_within_radius(rows, 50e3) == 0.5);
  }

  SUBCASE("the boundary counts as inside") {
    rows.assign(1, {});
    rows[0].x = 50e3;
    rows[0].y = 0.0;
    CHECK(time_within_radius(rows, 50e3) == 1.0);
  }
}

TEST_CASE("reward shaping") {
  std::vector<TrajectoryRow> rows(960);

  SUBCASE("all inside, no gate") {
    for (auto& r : rows) r.x = r.y = 0.0;
    CHECK(reward_episode(rows, 50e3) == doctest::Approx(960.0));
  }

  SUBCASE("far excursions decay exponentially") {
    rows.assign(1, {});
    rows[0].x = 150e3;
    CHECK(reward_episode(rows, 50e3) == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("outside branch limit at the boundary is 0.4") {
    rows.assign(1, {});
    rows[0].x = 50e3 + 1e-6;
    CHECK(reward_episode(rows, 50e3) == doctest::Approx(0.4).epsilon(1e-6));
  }

  SUBCASE("gated steps are scaled by 0.95") {
    rows.assign(2, {});
    rows[0].gate = true;
    CHECK(reward_episode(rows, 50e3) == doctest::Approx(0.95 + 1.0));
  }
}

TEST_CASE("episodes are deterministic and wind fields agent-independent") {
  const EpisodeConfig cfg = fast_episode(7, 40);

  CoastAgent coast;
  const EpisodeMetrics a = run_episode(coast, cfg);
  const EpisodeMetrics b = run_episode(coast, cfg);
  CHECK_FALSE(a.failed);
  CHECK(a.twr == b.twr);
  CHECK(a.reward == b.reward);
  CHECK(a.violations == b.violations);

  PumpAgent pump;
  const EpisodeMetrics c = run_episode(pump, cfg);
  CHECK(a.wind_fingerprint == c.wind_fingerprint);
}

TEST_CASE("trajectory rows capture the applied gated action") {
  EpisodeConfig cfg = fast_episode(3, 30);
  cfg.start_energy_min_frac = 0.9;
  PumpAgent pump;
  const EpisodeMetrics m = run_episode(pump, cfg);
  REQUIRE(m.trajectory.size() == 30);
  for (const auto& row : m.trajectory) CHECK(row.u == (row.gate ? 0.0 : -1.0));
}

TEST_CASE("sustained pumping eventually trips the power gate") {
  EpisodeConfig cfg = fast_episode(11, 400);
  PumpAgent pump;
  const EpisodeMetrics m = run_episode(pump, cfg);
  CHECK_FALSE(m.failed);
  CHECK(m.violations > 0);
}

TEST_CASE("confidence interval formula") {
  SUBCASE("matches 1.96 sqrt(var/n) directly") {
    const std::vector<double> v{0.0, 0.0, 2.0, 2.0};
    const MetricStats s = summarize(v);
    CHECK(s.mean == doctest::Approx(1.0));
    const double var = 4.0 / 3.0;  // unbiased sample variance
    CHECK(s.ci == doctest::Approx(1.96 * std::sqrt(var / 4.0)).epsilon(1e-12));
  }

  SUBCASE("single trial is NaN-guarded to zero width") {
    const std::vector<double> v{0.37};
    const MetricStats s = summarize(v);
    CHECK(s.mean == 0.37);
    CHECK(s.ci == 0.0);
    CHECK(std::isfinite(s.ci));
  }

  SUBCASE("quadrupling trials at fixed variance halves the width") {
    //  {0,0,2,2} has sample variance 4/3; the 16-point set below is scaled
    //  so its sample variance is also exactly 4/3
    const std::vector<double> small{0.0, 0.0, 2.0, 2.0};
    const double d = std::sqrt(5.0) / 2.0;
    std::vector<double> big;
    for (int i = 0; i < 8; ++i) {
      big.push_back(1.0 - d);
      big.push_back(1.0 + d);
    }
    const MetricStats a = summarize(small);
    const MetricStats b = summarize(big);
    CHECK(b.ci == doctest::Approx(a.ci / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("benchmark determinism and persistence") {
  const auto dir = std::filesystem::temp_directory_path() / "habkeep_test_bench";
  std::filesystem::create_directories(dir);

  BenchmarkOptions opts;
  opts.agents = {"coast", "pump"};
  opts.seed_begin = 0;
  opts.seed_end = 3;
  opts.workers = 2;
  opts.episode = fast_episode(0, 30);

  RunConfig rc;
  rc.episode = opts.episode;
  opts.config_fingerprint = config_fingerprint(rc);

  const BenchmarkResult r1 = run_benchmark(opts);
  const BenchmarkResult r2 = run_benchmark(opts);

  SUBCASE("summary CSV is byte-identical across reruns") {
    const auto p1 = (dir / "summary1.csv").string();
    const auto p2 = (dir / "summary2.csv").string();
    write_summary_csv(p1, r1);
    write_summary_csv(p2, r2);
    CHECK(read_file(p1) == read_file(p2));
    CHECK(!read_file(p1).empty());
  }

  SUBCASE("wind fingerprints match across agents per seed") {
    REQUIRE(r1.agents.size() == 2);
    for (std::size_t i = 0; i < r1.agents[0].episodes.size(); ++i)
      CHECK(r1.agents[0].episodes[i].wind_fingerprint ==
            r1.agents[1].episodes[i].wind_fingerprint);
  }

  SUBCASE("summary JSON round-trips bit-exactly") {
    const auto path = (dir / "summary.json").string();
    write_summary_json(path, r1);
    const BenchmarkResult loaded = read_summary_json(path);
    CHECK(loaded.config_fingerprint == r1.config_fingerprint);
    REQUIRE(loaded.agents.size() == r1.agents.size());
    for (std::size_t a = 0; a < r1.agents.size(); ++a) {
      CHECK(loaded.agents[a].twr.mean == r1.agents[a].twr.mean);
      CHECK(loaded.agents[a].twr.ci == r1.agents[a].twr.ci);
      CHECK(loaded.agents[a].reward.mean == r1.agents[a].reward.mean);
      CHECK(loaded.agents[a].violations.mean == r1.agents[a].violations.mean);
      REQUIRE(loaded.agents[a].episodes.size() == r1.agents[a].episodes.size());
      for (std::size_t e = 0; e < r1.agents[a].episodes.size(); ++e) {
        CHECK(loaded.agents[a].episodes[e].twr == r1.agents[a].episodes[e].twr);
        CHECK(loaded.agents[a].episodes[e].reward ==
              r1.agents[a].episodes[e].reward);
      }
    }
  }
}

TEST_CASE("ablation grids") {
  CHECK(default_ablation_values(AblationDimension::kHorizon) ==
        std::vector<std::string>{"30", "60", "120", "240", "480"});
  CHECK(default_ablation_values(AblationDimension::kReplan) ==
        std::vector<std::string>{"192", "96", "48", "24", "12"});
  CHECK(default_ablation_values(AblationDimension::kInits) ==
        std::vector<std::string>{"1", "5", "25", "100", "250"});
  CHECK(default_ablation_values(AblationDimension::kFidelity).size() == 5);
  CHECK(default_ablation_values(AblationDimension::kWindModel) ==
        std::vector<std::string>{"forecast", "column", "gp-column", "blend"});

  EpisodeConfig base = fast_episode(0);
  base.fompc.horizon = 240;
  const EpisodeConfig varied =
      apply_ablation_value(base, AblationDimension::kReplan, "192");
  CHECK(varied.fompc.replan_interval == 192);
  const EpisodeConfig fid =
      apply_ablation_value(base, AblationDimension::kFidelity, "2");
  CHECK(fid.fompc.fidelity == Fidelity::kPhi2);
}

TEST_CASE("config file parsing") {
  RunConfig cfg = default_run_config();

  SUBCASE("defaults match the documented values") {
    CHECK(cfg.episode.fompc.horizon == 240);
    CHECK(cfg.episode.fompc.replan_interval == 24);
    CHECK(cfg.episode.fompc.discount == 0.99);
    CHECK(cfg.episode.fompc.num_inits == 100);
    CHECK(cfg.episode.steps == 960);
    CHECK(cfg.episode.dt == 180.0);
  }

  SUBCASE("overrides apply and round-trip through the canonical text") {
    apply_config_text(cfg,
                      "# comment\n"
                      "fompc.horizon = 120\n"
                      "fompc.wind_model = blend\n"
                      "noise.bias_max = 2.0\n");
    CHECK(cfg.episode.fompc.horizon == 120);
    CHECK(cfg.episode.fompc.wind_model.kind == wind::WindModelKind::kBlend);
    CHECK(cfg.episode.noise.bias_max == 2.0);

    RunConfig reparsed = default_run_config();
    apply_config_text(reparsed, canonical_config_text(cfg));
    CHECK(canonical_config_text(reparsed) == canonical_config_text(cfg));
    CHECK(config_fingerprint(reparsed) == config_fingerprint(cfg));
  }

  SUBCASE("unknown keys and bad values are configuration errors") {
    CHECK_THROWS_AS(apply_config_override(cfg, "no.such.key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_override(cfg, "fompc.horizon", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "not a key value line\n"), ConfigError);
  }
}

TEST_CASE("trajectory CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "habkeep_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "traj.csv").string();

  EpisodeConfig cfg = fast_episode(21, 25);
  CoastAgent agent;
  const EpisodeMetrics m = run_episode(agent, cfg);
  REQUIRE_FALSE(m.failed);

  RunConfig rc;
  rc.episode = cfg;
  write_trajectory_csv(path, agent.name(), cfg.seed, m, rc);
  const LoadedTrajectory loaded = read_trajectory_csv(path);
  CHECK(loaded.agent == "coast");
  CHECK(loaded.seed == 21);
  REQUIRE(loaded.rows.size() == m.trajectory.size());
  for (std::size_t i = 0; i < loaded.rows.size(); ++i) {
    CHECK(loaded.rows[i].x == m.trajectory[i].x);  // %.17g round-trips exactly
    CHECK(loaded.rows[i].l == m.trajectory[i].l);
    CHECK(loaded.rows[i].u == m.trajectory[i].u);
  }
  // recomputed statistics match the live run
  CHECK(time_within_radius(loaded.rows, cfg.radius) == m.twr);
  CHECK(reward_episode(loaded.rows, cfg.radius) == m.reward);
  REQUIRE(loaded.config.has_value());
  CHECK(config_fingerprint(*loaded.config) == config_fingerprint(rc));
}

TEST_CASE("wind grid dump") {
  const auto dir = std::filesystem::temp_directory_path() / "habkeep_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "grid.csv").string();
  const auto field = wind::SyntheticWindField::generate(2);
  WindGridSpec spec;
  spec.x_count = 3;
  spec.y_count = 3;
  spec.l_count = 4;
  spec.t_count = 2;
  write_wind_grid_csv(path, field, nullptr, spec);
  const std::string text = read_file(path);
  // header plus one row per grid point
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 3 * 4 * 2);
}

TEST_CASE("failed episodes are reported, not silently dropped") {
  struct ThrowingAgent final : Agent {
    std::string name() const override { return "throwing"; }
    void begin_episode(const EpisodeContext&) override {}
    AgentAction act(const BalloonState&, std::span<const WindSample>,
                    int step) override {
      if (step >= 3) throw std::runtime_error("synthetic agent failure");
      return {0.0, {}};
    }
  };
  ThrowingAgent agent;
  const EpisodeMetrics m = run_episode(agent, fast_episode(1, 10));
  CHECK(m.failed);
  CHECK(m.failure == "synthetic agent failure");
}

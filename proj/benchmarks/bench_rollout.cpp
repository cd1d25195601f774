#include <benchmark/benchmark.h>

#include "habkeep/dynamics.hpp"
#include "habkeep/rng.hpp"
#include "habkeep/rollout.hpp"

namespace {

using namespace hab;

struct Setup {
  wind::SyntheticWindField field = wind::SyntheticWindField::generate(7);
  wind::GpForecastCorrector gp;
  BalloonParams params;
  BalloonState x0;
  difftrace::RolloutConfig rc;
  std::unique_ptr<wind::PlannerWindModel> wm;
  std::vector<double> raw;

  explicit Setup(int horizon) {
    SplitMix64 rng(3);
    const auto [lo, hi] = params.pressure_band();
    x0.x = 20e3;
    x0.y = -10e3;
    x0.l = 0.5 * (lo + hi);
    x0.n = params.float_ballonet(x0.l);
    x0.T = atmo::ambient_temperature(x0.l);
    x0.E = 0.8 * params.E_max;
    dyn::volume_superpressure(x0.l, x0.n, x0.T, params, x0.V, x0.p_env);

    std::vector<wind::WindObservation> obs;
    for (int i = 0; i < 50; ++i)
      obs.push_back({rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4),
                     rng.uniform(lo, hi), 180.0 * i,
                     {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
    gp = wind::GpForecastCorrector::fit(obs, wind::GpConfig{});

    const wind::WindModelConfig model{wind::WindModelKind::kGpColumn, 0.5};
    wm = std::make_unique<wind::PlannerWindModel>(model, field, &gp, x0.x, x0.y,
                                                  x0.t);
    rc.step.acs = AcsMode::kSurrogate;
    rc.step.surrogate = dyn::calibrate_surrogate_rates(params);

    raw.resize(static_cast<std::size_t>(horizon));
    for (double& r : raw) r = rng.uniform(-2.0, 2.0);
  }
};

void BM_ValueRollout(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        difftrace::value_rollout(s.raw, s.x0, *s.wm, s.params, s.rc));
}
BENCHMARK(BM_ValueRollout)->Arg(16)->Arg(240);

void BM_GradRollout(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        difftrace::grad_rollout(s.raw, s.x0, *s.wm, s.params, s.rc).value);
}
BENCHMARK(BM_GradRollout)->Arg(16)->Arg(240);

void BM_EnvironmentStep(benchmark::State& state) {
  const Setup s(16);
  const auto noise = wind::NoiseField::generate(7);
  const auto truth = [&](const double& x, const double& y, const double& l,
                         double t, double& u, double& v) {
    const wind::WindVector w = wind::truth_at(s.field, noise, x, y, l, t);
    u = w.u_east;
    v = w.v_north;
  };
  dyn::StepOptions opt;
  BalloonState st = s.x0;
  for (auto _ : state) {
    st = dyn::step(st, truth, -0.3, s.params, opt);
    benchmark::DoNotOptimize(st.x);
  }
}
BENCHMARK(BM_EnvironmentStep);

void BM_GpFit(benchmark::State& state) {
  SplitMix64 rng(5);
  std::vector<wind::WindObservation> obs;
  for (int i = 0; i < 50; ++i)
    obs.push_back({rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4),
                   rng.uniform(5500.0, 6600.0), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  for (auto _ : state)
    benchmark::DoNotOptimize(
        wind::GpForecastCorrector::fit(obs, wind::GpConfig{}).size());
}
BENCHMARK(BM_GpFit);

}  // namespace

BENCHMARK_MAIN();

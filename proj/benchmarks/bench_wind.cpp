#include <benchmark/benchmark.h>

#include "habkeep/rng.hpp"
#include "habkeep/wind_field.hpp"
#include "habkeep/wind_model.hpp"

namespace {

using namespace hab;

void BM_ForecastAt(benchmark::State& state) {
  const auto field = wind::SyntheticWindField::generate(11);
  SplitMix64 rng(1);
  double l = 6000.0;
  for (auto _ : state) {
    l = 5200.0 + std::fmod(l * 1.37, 1500.0);
    benchmark::DoNotOptimize(field.at(12e3, -9e3, l, 3600.0));
  }
}
BENCHMARK(BM_ForecastAt);

void BM_NoiseAt(benchmark::State& state) {
  const auto noise = wind::NoiseField::generate(11);
  double l = 6000.0;
  for (auto _ : state) {
    l = 5200.0 + std::fmod(l * 1.37, 1500.0);
    benchmark::DoNotOptimize(noise.at(12e3, -9e3, l, 3600.0));
  }
}
BENCHMARK(BM_NoiseAt);

void BM_ColumnCached(benchmark::State& state) {
  const auto field = wind::SyntheticWindField::generate(11);
  SplitMix64 rng(2);
  std::vector<wind::WindObservation> obs;
  for (int i = 0; i < 50; ++i)
    obs.push_back({rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4),
                   rng.uniform(5500.0, 6600.0), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  const auto gp = wind::GpForecastCorrector::fit(obs, wind::GpConfig{});
  const wind::WindModelConfig model{wind::WindModelKind::kGpColumn, 0.5};
  const wind::PlannerWindModel wm(model, field, &gp, 0.0, 0.0, 0.0, true);
  double l = 6000.0;
  double u, v, du, dv;
  for (auto _ : state) {
    l = 5200.0 + std::fmod(l * 1.37, 1500.0);
    wm.column_value_slope(l, u, v, du, dv);
    benchmark::DoNotOptimize(u + v + du + dv);
  }
}
BENCHMARK(BM_ColumnCached);

void BM_ColumnExact(benchmark::State& state) {
  const auto field = wind::SyntheticWindField::generate(11);
  SplitMix64 rng(2);
  std::vector<wind::WindObservation> obs;
  for (int i = 0; i < 50; ++i)
    obs.push_back({rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4),
                   rng.uniform(5500.0, 6600.0), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  const auto gp = wind::GpForecastCorrector::fit(obs, wind::GpConfig{});
  const wind::WindModelConfig model{wind::WindModelKind::kGpColumn, 0.5};
  const wind::PlannerWindModel wm(model, field, &gp, 0.0, 0.0, 0.0, false);
  double l = 6000.0;
  double u, v, du, dv;
  for (auto _ : state) {
    l = 5200.0 + std::fmod(l * 1.37, 1500.0);
    wm.column_value_slope(l, u, v, du, dv);
    benchmark::DoNotOptimize(u + v + du + dv);
  }
}
BENCHMARK(BM_ColumnExact);

}  // namespace

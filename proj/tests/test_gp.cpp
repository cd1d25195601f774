#include <doctest.h>

#include <cmath>

#include "habkeep/gp_corrector.hpp"
#include "habkeep/rng.hpp"
#include "habkeep/wind_model.hpp"

using namespace hab;
using wind::GpConfig;
using wind::GpForecastCorrector;
using wind::WindObservation;
using wind::WindVector;

TEST_CASE("empty training set predicts the prior mean") {
  const auto gp = GpForecastCorrector::fit({}, GpConfig{});
  const WindVector w = gp.predict(1e5, -3e4, 6000.0, 7200.0);
  CHECK(w.u_east == 0.0);
  CHECK(w.v_north == 0.0);
  CHECK(gp.empty());
}

TEST_CASE("single observation shrinks by the noise ratio") {
  // closed-form 1-point GP: prediction = k(0) / (k(0) + sigma_n^2) * error
  GpConfig cfg;
  const WindObservation obs{10e3, -5e3, 6100.0, 600.0, {3.0, 0.0}};
  const auto gp = GpForecastCorrector::fit(std::span(&obs, 1), cfg);
  const double k0 = cfg.sigma_f * cfg.sigma_f;
  const double shrink = k0 / (k0 + cfg.sigma_n * cfg.sigma_n);
  const WindVector w = gp.predict(obs.x, obs.y, obs.l, obs.t);
  CHECK(w.u_east == doctest::Approx(3.0 * shrink).epsilon(1e-12));
  CHECK(w.v_north == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("prediction reverts to the prior far from all data") {
  GpConfig cfg;
  std::vector<WindObservation> obs;
  SplitMix64 rng(4);
  for (int i = 0; i < 30; ++i)
    obs.push_back({rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4),
                   rng.uniform(5800.0, 6400.0), 60.0 * i,
                   {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);
  // 100+ length scales away in x
  const WindVector w = gp.predict(100.0 * cfg.length_x, 0.0, 6000.0, 1800.0);
  CHECK(std::hypot(w.u_east, w.v_north) < 1e-3);
}

TEST_CASE("near-interpolation at training inputs when noise vanishes") {
  GpConfig cfg;
  cfg.sigma_n = 1e-6;
  std::vector<WindObservation> obs;
  SplitMix64 rng(9);
  for (int i = 0; i < 12; ++i)
    obs.push_back({rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4),
                   rng.uniform(5600.0, 6500.0), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);
  double worst = 0.0;
  for (const auto& o : obs) {
    const WindVector w = gp.predict(o.x, o.y, o.l, o.t);
    worst = std::max(worst, std::abs(w.u_east - o.error.u_east));
    worst = std::max(worst, std::abs(w.v_north - o.error.v_north));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("duplicated inputs with zero noise succeed through the jitter ladder") {
  GpConfig cfg;
  cfg.sigma_n = 0.0;
  std::vector<WindObservation> obs(3, {1e3, 2e3, 6000.0, 300.0, {1.0, -1.0}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);  // singular without jitter
  const WindVector w = gp.predict(1e3, 2e3, 6000.0, 300.0);
  CHECK(std::isfinite(w.u_east));
  CHECK(w.u_east == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("capacity keeps only the newest observations") {
  GpConfig cfg;
  cfg.capacity = 4;
  std::vector<WindObservation> obs;
  for (int i = 0; i < 10; ++i)
    obs.push_back({0.0, 0.0, 5600.0 + 100.0 * i, 60.0 * i, {1.0, 0.0}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);
  CHECK(gp.size() == 4);
}

TEST_CASE("column view matches predict and its pressure derivative") {
  GpConfig cfg;
  std::vector<WindObservation> obs;
  SplitMix64 rng(21);
  for (int i = 0; i < 25; ++i)
    obs.push_back({rng.uniform(-8e4, 8e4), rng.uniform(-8e4, 8e4),
                   rng.uniform(5500.0, 6600.0), 180.0 * i,
                   {rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);
  const double x0 = 12e3, y0 = -8e3, t0 = 5400.0;
  const auto col = gp.column(x0, y0, t0);
  for (double l = 5400.0; l <= 6700.0; l += 100.0) {
    double u, v, du, dv;
    col.value_slope(l, u, v, du, dv);
    const WindVector w = gp.predict(x0, y0, l, t0);
    CHECK(u == doctest::Approx(w.u_east).epsilon(1e-12));
    CHECK(v == doctest::Approx(w.v_north).epsilon(1e-12));
    const double h = 0.01;
    const WindVector wp = gp.predict(x0, y0, l + h, t0);
    const WindVector wm = gp.predict(x0, y0, l - h, t0);
    CHECK(du == doctest::Approx((wp.u_east - wm.u_east) / (2 * h)).epsilon(1e-5));
    CHECK(dv == doctest::Approx((wp.v_north - wm.v_north) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("wind model identities") {
  const auto field = wind::SyntheticWindField::generate(77);
  BalloonState anchor;
  anchor.x = 20e3;
  anchor.y = -15e3;
  anchor.l = 6000.0;
  anchor.t = 3600.0;

  const auto empty_gp = GpForecastCorrector::fit({}, GpConfig{});

  SUBCASE("column model ignores query position and time") {
    const wind::WindModelConfig psi1{wind::WindModelKind::kColumn, 0.5};
    const WindVector a = wind_model_at(psi1, anchor, nullptr, field, 1e5, 2e5, 6100.0, 0.0);
    const WindVector b =
        wind_model_at(psi1, anchor, nullptr, field, -7e5, 4e4, 6100.0, 9e4);
    CHECK(a.u_east == b.u_east);
    CHECK(a.v_north == b.v_north);
  }

  SUBCASE("GP column with an empty GP equals the plain column") {
    const wind::WindModelConfig psi1{wind::WindModelKind::kColumn, 0.5};
    const wind::WindModelConfig psi2{wind::WindModelKind::kGpColumn, 0.5};
    for (double l = 5500.0; l <= 6600.0; l += 50.0) {
      const WindVector a = wind_model_at(psi1, anchor, nullptr, field, 0, 0, l, 0);
      const WindVector b = wind_model_at(psi2, anchor, &empty_gp, field, 0, 0, l, 0);
      CHECK(a.u_east == b.u_east);
      CHECK(a.v_north == b.v_north);
    }
  }

  SUBCASE("blend endpoints") {
    wind::WindModelConfig blend{wind::WindModelKind::kBlend, 1.0};
    const wind::WindModelConfig psi0{wind::WindModelKind::kForecast, 0.5};
    const wind::WindModelConfig psi2{wind::WindModelKind::kGpColumn, 0.5};
    const double x = 9e4, y = -3e4, l = 6200.0, t = 7200.0;
    WindVector a = wind_model_at(blend, anchor, &empty_gp, field, x, y, l, t);
    WindVector b = wind_model_at(psi0, anchor, nullptr, field, x, y, l, t);
    CHECK(a.u_east == doctest::Approx(b.u_east).epsilon(1e-15));
    CHECK(a.v_north == doctest::Approx(b.v_north).epsilon(1e-15));
    blend.blend_alpha = 0.0;
    a = wind_model_at(blend, anchor, &empty_gp, field, x, y, l, t);
    b = wind_model_at(psi2, anchor, &empty_gp, field, x, y, l, t);
    CHECK(a.u_east == doctest::Approx(b.u_east).epsilon(1e-15));
    CHECK(a.v_north == doctest::Approx(b.v_north).epsilon(1e-15));
  }

  SUBCASE("missing GP is a configuration error") {
    const wind::WindModelConfig psi2{wind::WindModelKind::kGpColumn, 0.5};
    CHECK_THROWS_AS(wind_model_at(psi2, anchor, nullptr, field, 0, 0, 6000.0, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("planner wind model: cache agrees with the exact column") {
  const auto field = wind::SyntheticWindField::generate(31);
  GpConfig cfg;
  std::vector<WindObservation> obs;
  SplitMix64 rng(14);
  for (int i = 0; i < 40; ++i)
    obs.push_back({rng.uniform(-6e4, 6e4), rng.uniform(-6e4, 6e4),
                   rng.uniform(5500.0, 6600.0), 180.0 * i,
                   {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}});
  const auto gp = GpForecastCorrector::fit(obs, cfg);

  const wind::WindModelConfig psi2{wind::WindModelKind::kGpColumn, 0.5};
  const wind::PlannerWindModel cached(psi2, field, &gp, 5e3, -2e3, 7200.0, true);
  const wind::PlannerWindModel exact(psi2, field, &gp, 5e3, -2e3, 7200.0, false);

  // worst case sits at the wind spline's knots, where curvature jumps
  for (double l = 5100.0; l <= 7400.0; l += 13.7) {
    double cu, cv, cdu, cdv, eu, ev, edu, edv;
    cached.column_value_slope(l, cu, cv, cdu, cdv);
    exact.column_value_slope(l, eu, ev, edu, edv);
    CHECK(std::abs(cu - eu) < 1e-6);
    CHECK(std::abs(cv - ev) < 1e-6);
    CHECK(std::abs(cdu - edu) < 1e-5);
    CHECK(std::abs(cdv - edv) < 1e-5);
  }

  // and the exact planner column equals the public model evaluation
  BalloonState anchor;
  anchor.x = 5e3;
  anchor.y = -2e3;
  anchor.t = 7200.0;
  for (double l = 5500.0; l <= 6600.0; l += 100.0) {
    double u, v, du, dv;
    exact.column_value_slope(l, u, v, du, dv);
    const WindVector w = wind_model_at(psi2, anchor, &gp, field, 0, 0, l, 0);
    CHECK(u == doctest::Approx(w.u_east).epsilon(1e-12));
    CHECK(v == doctest::Approx(w.v_north).epsilon(1e-12));
  }
}

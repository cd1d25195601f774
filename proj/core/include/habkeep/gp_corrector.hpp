#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "habkeep/wind_field.hpp"

namespace hab::wind {

// One truth-wind sample taken at a past balloon position; error is
// observed minus forecast there.
struct WindObservation {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double l = 0.0;  // Pa
  double t = 0.0;  // s
  WindVector error;
};

struct GpConfig {
  double length_x = 100e3;   // m
  double length_y = 100e3;   // m
  double length_l = 1500.0;  // Pa
  double length_t = 10800.0; // s (3 h)
  double sigma_f = 2.0;      // m/s, signal std
  double sigma_n = 0.5;      // m/s, observation noise std
  int capacity = 50;         // most recent observations kept
};

// Exact GP regression of the forecast error with a Matern-3/2 kernel over
// scaled (x, y, l, t), one independent GP per wind component. Immutable once
// fitted; refit once per replan.
class GpForecastCorrector {
 public:
  GpForecastCorrector() = default;

  // Keeps the most recent `capacity` observations. Cholesky failures retry
  // with jitter 1e-8, 1e-7, 1e-6 and then throw.
  static GpForecastCorrector fit(std::span<const WindObservation> observations,
                                 const GpConfig& config = {});

  bool empty() const { return ls_.empty(); }
  std::size_t size() const { return ls_.size(); }
  const GpConfig& config() const { return cfg_; }

  // Posterior mean of the forecast error at a query point.
  WindVector predict(double x, double y, double l, double t) const;

  // Column view anchored at (x0, y0, t0): only l varies at query time.
  // Precomputes the non-pressure part of the scaled squared distances.
  class ColumnView {
   public:
    // value and d/dl of the posterior mean, both components
    void value_slope(double l, double& u, double& v, double& du, double& dv) const;

   private:
    friend class GpForecastCorrector;
    double inv_len_l2_ = 0.0;
    double sigma_f2_ = 0.0;
    std::vector<double> base_dist2_;  // per point: scaled (x,y,t) distance^2
    std::vector<double> l_train_;
    std::vector<double> alpha_u_;
    std::vector<double> alpha_v_;
  };
  ColumnView column(double x0, double y0, double t0) const;

 private:
  double kernel(double x, double y, double l, double t, std::size_t i) const;

  GpConfig cfg_;
  std::vector<double> xs_, ys_, ls_, ts_;
  std::vector<double> alpha_u_, alpha_v_;
};

}  // namespace hab::wind

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "habkeep/autodiff.hpp"

namespace hab::wind {

struct WindVector {
  double u_east = 0.0;   // m/s
  double v_north = 0.0;  // m/s
};

inline constexpr double kMaxWindSpeed = 60.0;  // m/s, generator clamp

namespace detail {

// Piecewise-cubic C1 interpolant (Hermite form, three-point slopes, zero
// slope at both ends). Queries outside the knot range clamp to the edge.
struct CubicSpline {
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<double> slopes;

  static CubicSpline fit(std::span<const double> xs, std::span<const double> ys);

  int segment(double x) const {
    int i = 0;
    const int n = static_cast<int>(knots.size());
    while (i < n - 2 && x >= knots[i + 1]) ++i;
    return i;
  }

  template <class S>
  S eval(const S& x) const {
    const double xv = value_of(x);
    if (xv <= knots.front()) return S(values.front());
    if (xv >= knots.back()) return S(values.back());
    const int i = segment(xv);
    const double h = knots[i + 1] - knots[i];
    const S tt = (x - knots[i]) / h;
    const S t2 = tt * tt;
    const S t3 = t2 * tt;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * values[i] +
           (t3 - 2.0 * t2 + tt) * (h * slopes[i]) +
           (-2.0 * t3 + 3.0 * t2) * values[i + 1] +
           (t3 - t2) * (h * slopes[i + 1]);
  }

  double eval_value(double x) const { return value_of(eval<double>(x)); }
  double eval_slope(double x) const;
};

}  // namespace detail

// Seeded procedural forecast field W0. Built from per-layer base directions
// and speeds splined in pressure, with slow sinusoidal drift in (x, y, t).
// Direction rotates monotonically across the controllable pressure band so
// that opposing winds exist by construction. Identical seeds give
// bit-identical fields.
class SyntheticWindField {
 public:
  struct GenConfig {
    double band_lo = 5490.0;        // Pa, inner knot span start
    double band_hi = 6570.0;        // Pa, inner knot span end
    // Rotation beyond a half turn guarantees near-opposing wind pairs in the
    // band, so drift cancellation is achievable rather than merely reduced.
    double rotation_min = 3.403;    // rad (195 deg) total in-band rotation
    double rotation_max = 4.102;    // rad (235 deg)
    double inner_speed_min = 2.0;   // m/s
    double inner_speed_max = 5.5;   // m/s
    double outer_speed_min = 2.0;   // m/s
    double outer_speed_max = 15.0;  // m/s
    double drift_length_xy = 300e3;  // m
    double drift_length_t = 43200.0; // s (12 h)
  };

  static SyntheticWindField generate(std::uint64_t seed, const GenConfig& cfg);
  static SyntheticWindField generate(std::uint64_t seed) {
    return generate(seed, GenConfig{});
  }

  std::uint64_t seed() const { return seed_; }
  int layer_count() const { return static_cast<int>(direction_.knots.size()); }
  double knot_lo() const { return direction_.knots.front(); }
  double knot_hi() const { return direction_.knots.back(); }

  // Drift terms frozen at one horizontal location and time; the remaining
  // dependence is on pressure only (the "wind column" view).
  struct ColumnContext {
    double dir_offset = 0.0;
    double speed_factor = 1.0;
  };
  ColumnContext column_context(double x0, double y0, double t0) const;

  template <class S>
  void eval(const S& x, const S& y, const S& l, double t, S& out_u, S& out_v) const {
    using std::cos;
    using std::sin;
    note_band(value_of(l));
    const S theta = direction_.eval(l) + dir_drift(x, y, t);
    const S speed = speed_.eval(l) * speed_drift(x, y, t);
    out_u = speed * cos(theta);
    out_v = speed * sin(theta);
    clamp_speed(out_u, out_v);
  }

  template <class S>
  void eval_column(const ColumnContext& ctx, const S& l, S& out_u, S& out_v) const {
    using std::cos;
    using std::sin;
    note_band(value_of(l));
    const S theta = direction_.eval(l) + ctx.dir_offset;
    const S speed = speed_.eval(l) * ctx.speed_factor;
    out_u = speed * cos(theta);
    out_v = speed * sin(theta);
    clamp_speed(out_u, out_v);
  }

  WindVector at(double x, double y, double l, double t) const {
    WindVector w;
    eval(x, y, l, t, w.u_east, w.v_north);
    return w;
  }

  // Exact column value and d/dl at the anchor, used by the planner cache.
  void column_value_slope(const ColumnContext& ctx, double l, double& u, double& v,
                          double& du, double& dv) const;

  std::uint64_t out_of_band_queries() const { return *out_of_band_; }

 private:
  template <class S>
  S dir_drift(const S& x, const S& y, double t) const {
    using std::sin;
    return amp_dir_[0] * sin(x * inv_len_xy_ + phase_dir_[0]) +
           amp_dir_[1] * sin(y * inv_len_xy_ + phase_dir_[1]) +
           amp_dir_[2] * std::sin(t * inv_len_t_ + phase_dir_[2]);
  }

  template <class S>
  S speed_drift(const S& x, const S& y, double t) const {
    using std::sin;
    return 1.0 + amp_spd_[0] * sin(x * inv_len_xy_ + phase_spd_[0]) +
           amp_spd_[1] * sin(y * inv_len_xy_ + phase_spd_[1]) +
           amp_spd_[2] * std::sin(t * inv_len_t_ + phase_spd_[2]);
  }

  template <class S>
  static void clamp_speed(S& u, S& v) {
    const double norm =
        std::sqrt(value_of(u) * value_of(u) + value_of(v) * value_of(v));
    if (norm > kMaxWindSpeed) {
      const double scale = kMaxWindSpeed / norm;
      u = u * scale;
      v = v * scale;
    }
  }

  void note_band(double l) const {
#ifndef NDEBUG
    if (l < direction_.knots.front() || l > direction_.knots.back())
      out_of_band_->fetch_add(1, std::memory_order_relaxed);
#else
    (void)l;
#endif
  }

  std::uint64_t seed_ = 0;
  detail::CubicSpline direction_;  // rad vs Pa
  detail::CubicSpline speed_;      // m/s vs Pa
  double amp_dir_[3] = {0, 0, 0};
  double phase_dir_[3] = {0, 0, 0};
  double amp_spd_[3] = {0, 0, 0};
  double phase_spd_[3] = {0, 0, 0};
  double inv_len_xy_ = 0.0;
  double inv_len_t_ = 0.0;
  std::shared_ptr<std::atomic<std::uint64_t>> out_of_band_ =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

// Seeded zero-mean gradient noise b(x, y, l, t) plus an optional constant
// per-seed bias, added to the forecast to form the truth wind.
struct NoiseParams {
  int octaves = 3;
  double amplitude = 2.0;    // m/s
  double length_x = 200e3;   // m
  double length_y = 200e3;   // m
  double length_l = 2000.0;  // Pa
  double length_t = 21600.0; // s (6 h)
  double bias_min = 0.0;     // m/s, constant per-seed bias magnitude range
  double bias_max = 0.0;
};

class NoiseField {
 public:
  static NoiseField generate(std::uint64_t seed, const NoiseParams& params = {});

  WindVector at(double x, double y, double l, double t) const;
  const NoiseParams& params() const { return params_; }
  WindVector bias() const { return bias_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double sample_component(int component, double px, double py, double pl,
                          double pt) const;

  std::uint64_t seed_ = 0;
  NoiseParams params_;
  WindVector bias_;
};

// The only wind the environment dynamics consume.
inline WindVector truth_at(const SyntheticWindField& field, const NoiseField& noise,
                           double x, double y, double l, double t) {
  const WindVector w0 = field.at(x, y, l, t);
  const WindVector b = noise.at(x, y, l, t);
  return {w0.u_east + b.u_east, w0.v_north + b.v_north};
}

inline WindVector forecast_at(const SyntheticWindField& field, double x, double y,
                              double l, double t) {
  return field.at(x, y, l, t);
}

}  // namespace hab::wind

#include "habkeep/wind_field.hpp"

#include <algorithm>
#include <cmath>

#include "habkeep/rng.hpp"

namespace hab::wind {

namespace detail {

CubicSpline CubicSpline::fit(std::span<const double> xs, std::span<const double> ys) {
  CubicSpline s;
  s.knots.assign(xs.begin(), xs.end());
  s.values.assign(ys.begin(), ys.end());
  const int n = static_cast<int>(xs.size());
  s.slopes.assign(static_cast<std::size_t>(n), 0.0);
  // Three-point slopes in the interior, zero slope at the ends so the
  // clamped extension beyond the knot range stays C1.
  for (int i = 1; i < n - 1; ++i)
    s.slopes[static_cast<std::size_t>(i)] =
        (ys[static_cast<std::size_t>(i + 1)] - ys[static_cast<std::size_t>(i - 1)]) /
        (xs[static_cast<std::size_t>(i + 1)] - xs[static_cast<std::size_t>(i - 1)]);
  return s;
}

double CubicSpline::eval_slope(double x) const {
  if (x <= knots.front() || x >= knots.back()) return 0.0;
  const int i = segment(x);
  const double h = knots[static_cast<std::size_t>(i + 1)] - knots[static_cast<std::size_t>(i)];
  const double tt = (x - knots[static_cast<std::size_t>(i)]) / h;
  const double t2 = tt * tt;
  return ((6.0 * t2 - 6.0 * tt) * values[static_cast<std::size_t>(i)] +
          (3.0 * t2 - 4.0 * tt + 1.0) * h * slopes[static_cast<std::size_t>(i)] +
          (-6.0 * t2 + 6.0 * tt) * values[static_cast<std::size_t>(i + 1)] +
          (3.0 * t2 - 2.0 * tt) * h * slopes[static_cast<std::size_t>(i + 1)]) /
         h;
}

}  // namespace detail

SyntheticWindField SyntheticWindField::generate(std::uint64_t seed,
                                                const GenConfig& cfg) {
  SplitMix64 rng = substream(seed, "wind-field");
  SyntheticWindField f;
  f.seed_ = seed;

  const int layer_total = 5 + static_cast<int>(rng.next_u64() & 1);  // 5 or 6
  const int inner = layer_total - 2;

  std::vector<double> knots(static_cast<std::size_t>(layer_total));
  const double span = cfg.band_hi - cfg.band_lo;
  const double gap = span / (inner - 1);
  for (int i = 0; i < inner; ++i) {
    double k = cfg.band_lo + gap * i;
    if (i > 0 && i < inner - 1) k += rng.uniform(-0.15, 0.15) * gap;
    knots[static_cast<std::size_t>(i + 1)] = k;
  }
  knots.front() = cfg.band_lo - rng.uniform(800.0, 1100.0);
  knots.back() = cfg.band_hi + rng.uniform(800.0, 1100.0);

  const double theta0 = rng.uniform(0.0, 2.0 * M_PI);
  const double rot_sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
  const double total_rot = rng.uniform(cfg.rotation_min, cfg.rotation_max);

  std::vector<double> weights(static_cast<std::size_t>(inner - 1));
  double weight_sum = 0.0;
  for (double& w : weights) {
    w = rng.uniform(0.8, 1.0);
    weight_sum += w;
  }
  const double outer_rot_lo = rng.uniform(0.0873, 0.3142);  // 5..18 deg
  const double outer_rot_hi = rng.uniform(0.0873, 0.3142);

  std::vector<double> dirs(static_cast<std::size_t>(layer_total));
  dirs[0] = theta0;
  dirs[1] = theta0 + rot_sign * outer_rot_lo;
  for (int i = 0; i < inner - 1; ++i)
    dirs[static_cast<std::size_t>(i + 2)] =
        dirs[static_cast<std::size_t>(i + 1)] +
        rot_sign * total_rot * weights[static_cast<std::size_t>(i)] / weight_sum;
  dirs.back() = dirs[static_cast<std::size_t>(layer_total - 2)] + rot_sign * outer_rot_hi;

  std::vector<double> speeds(static_cast<std::size_t>(layer_total));
  for (int i = 0; i < inner; ++i)
    speeds[static_cast<std::size_t>(i + 1)] =
        rng.uniform(cfg.inner_speed_min, cfg.inner_speed_max);
  speeds.front() = std::clamp(speeds[1] + rng.uniform(-5.0, 5.0),
                              cfg.outer_speed_min, cfg.outer_speed_max);
  speeds.back() = std::clamp(speeds[static_cast<std::size_t>(layer_total - 2)] +
                                 rng.uniform(-5.0, 5.0),
                             cfg.outer_speed_min, cfg.outer_speed_max);

  f.direction_ = detail::CubicSpline::fit(knots, dirs);
  f.speed_ = detail::CubicSpline::fit(knots, speeds);

  for (int i = 0; i < 2; ++i) f.amp_dir_[i] = rng.uniform(0.07, 0.21);
  f.amp_dir_[2] = rng.uniform(0.10, 0.28);
  for (double& p : f.phase_dir_) p = rng.uniform(0.0, 2.0 * M_PI);
  for (int i = 0; i < 2; ++i) f.amp_spd_[i] = rng.uniform(0.03, 0.10);
  f.amp_spd_[2] = rng.uniform(0.05, 0.15);
  for (double& p : f.phase_spd_) p = rng.uniform(0.0, 2.0 * M_PI);

  f.inv_len_xy_ = 2.0 * M_PI / cfg.drift_length_xy;
  f.inv_len_t_ = 2.0 * M_PI / cfg.drift_length_t;
  return f;
}

SyntheticWindField::ColumnContext SyntheticWindField::column_context(
    double x0, double y0, double t0) const {
  ColumnContext ctx;
  ctx.dir_offset = value_of(dir_drift(x0, y0, t0));
  ctx.speed_factor = value_of(speed_drift(x0, y0, t0));
  return ctx;
}

void SyntheticWindField::column_value_slope(const ColumnContext& ctx, double l,
                                            double& u, double& v, double& du,
                                            double& dv) const {
  note_band(l);
  const double theta = direction_.eval_value(l) + ctx.dir_offset;
  const double speed = speed_.eval_value(l) * ctx.speed_factor;
  const double dtheta = direction_.eval_slope(l);
  const double dspeed = speed_.eval_slope(l) * ctx.speed_factor;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  u = speed * c;
  v = speed * s;
  du = dspeed * c - speed * s * dtheta;
  dv = dspeed * s + speed * c * dtheta;
  const double norm = std::sqrt(u * u + v * v);
  if (norm > kMaxWindSpeed) {
    const double scale = kMaxWindSpeed / norm;
    u *= scale;
    v *= scale;
    du *= scale;  // scaling branch held constant, matching eval()
    dv *= scale;
  }
}

// ---------------------------------------------------------------------------
// Gradient noise
// ---------------------------------------------------------------------------

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t corner_hash(std::uint64_t seed, std::int64_t ix, std::int64_t iy,
                          std::int64_t iz, std::int64_t iw) {
  std::uint64_t h = seed;
  h = mix64(h ^ (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(iz) * 0x165667B19E3779F9ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(iw) * 0x27D4EB2F165667C5ULL));
  return h;
}

double grad_dot(std::uint64_t h, double dx, double dy, double dz, double dw) {
  const double gx = (h & 1) ? 1.0 : -1.0;
  const double gy = (h & 2) ? 1.0 : -1.0;
  const double gz = (h & 4) ? 1.0 : -1.0;
  const double gw = (h & 8) ? 1.0 : -1.0;
  return gx * dx + gy * dy + gz * dz + gw * dw;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// 4-D lattice gradient noise, output roughly in [-1, 1].
double gradient_noise4(std::uint64_t seed, double x, double y, double z, double w) {
  const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z),
               fw = std::floor(w);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const auto iw = static_cast<std::int64_t>(fw);
  const double dx = x - fx, dy = y - fy, dz = z - fz, dw = w - fw;
  const double ux = fade(dx), uy = fade(dy), uz = fade(dz), uw = fade(dw);

  double corner[16];
  for (int c = 0; c < 16; ++c) {
    const int ox = c & 1, oy = (c >> 1) & 1, oz = (c >> 2) & 1, ow = (c >> 3) & 1;
    const std::uint64_t h = corner_hash(seed, ix + ox, iy + oy, iz + oz, iw + ow);
    corner[c] = grad_dot(h, dx - ox, dy - oy, dz - oz, dw - ow);
  }
  double vx[8];
  for (int c = 0; c < 8; ++c) vx[c] = lerp(corner[2 * c], corner[2 * c + 1], ux);
  double vy[4];
  for (int c = 0; c < 4; ++c) vy[c] = lerp(vx[2 * c], vx[2 * c + 1], uy);
  double vz[2];
  for (int c = 0; c < 2; ++c) vz[c] = lerp(vy[2 * c], vy[2 * c + 1], uz);
  return 0.5 * lerp(vz[0], vz[1], uw);
}

}  // namespace

NoiseField NoiseField::generate(std::uint64_t seed, const NoiseParams& params) {
  NoiseField n;
  n.seed_ = seed;
  n.params_ = params;
  if (params.bias_max > 0.0) {
    SplitMix64 rng = substream(seed, "noise-bias");
    const double dir = rng.uniform(0.0, 2.0 * M_PI);
    const double mag = rng.uniform(params.bias_min, params.bias_max);
    n.bias_ = {mag * std::cos(dir), mag * std::sin(dir)};
  }
  return n;
}

double NoiseField::sample_component(int component, double px, double py, double pl,
                                    double pt) const {
  double total = 0.0;
  double weight = 1.0;
  double weight_sum = 0.0;
  double freq = 1.0;
  for (int o = 0; o < params_.octaves; ++o) {
    const std::uint64_t so =
        mix64(seed_ + 0x51ED270B4D2F1B6DULL * static_cast<std::uint64_t>(component) +
              0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(o + 1));
    total += weight * gradient_noise4(so, px * freq, py * freq, pl * freq, pt * freq);
    weight_sum += weight;
    weight *= 0.5;
    freq *= 2.0;
  }
  return total / weight_sum;
}

WindVector NoiseField::at(double x, double y, double l, double t) const {
  const double px = x / params_.length_x;
  const double py = y / params_.length_y;
  const double pl = l / params_.length_l;
  const double pt = t / params_.length_t;
  return {params_.amplitude * sample_component(0, px, py, pl, pt) + bias_.u_east,
          params_.amplitude * sample_component(1, px, py, pl, pt) + bias_.v_north};
}

}  // namespace hab::wind

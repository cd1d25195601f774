#include "habkeep/gp_corrector.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace hab::wind {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double matern32(double r) { return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r); }

}  // namespace

GpForecastCorrector GpForecastCorrector::fit(
    std::span<const WindObservation> observations, const GpConfig& config) {
  GpForecastCorrector gp;
  gp.cfg_ = config;

  const std::size_t total = observations.size();
  const std::size_t keep =
      std::min<std::size_t>(total, static_cast<std::size_t>(config.capacity));
  const std::size_t first = total - keep;  // oldest evicted first
  if (keep == 0) return gp;

  gp.xs_.reserve(keep);
  gp.ys_.reserve(keep);
  gp.ls_.reserve(keep);
  gp.ts_.reserve(keep);
  Eigen::VectorXd err_u(static_cast<Eigen::Index>(keep));
  Eigen::VectorXd err_v(static_cast<Eigen::Index>(keep));
  for (std::size_t i = 0; i < keep; ++i) {
    const WindObservation& o = observations[first + i];
    gp.xs_.push_back(o.x);
    gp.ys_.push_back(o.y);
    gp.ls_.push_back(o.l);
    gp.ts_.push_back(o.t);
    err_u(static_cast<Eigen::Index>(i)) = o.error.u_east;
    err_v(static_cast<Eigen::Index>(i)) = o.error.v_north;
  }

  const auto n = static_cast<Eigen::Index>(keep);
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = config.sigma_f * config.sigma_f;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = gp.kernel(gp.xs_[static_cast<std::size_t>(i)],
                                 gp.ys_[static_cast<std::size_t>(i)],
                                 gp.ls_[static_cast<std::size_t>(i)],
                                 gp.ts_[static_cast<std::size_t>(i)],
                                 static_cast<std::size_t>(j));
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }

  const double noise_var = config.sigma_n * config.sigma_n;
  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += noise_var + jitter;
    llt.compute(reg);
    if (llt.info() == Eigen::Success) break;
    jitter = (jitter == 0.0) ? 1e-8 : jitter * 10.0;
    if (attempt == 3)
      throw std::runtime_error("GpForecastCorrector::fit: Cholesky failed after jitter retries");
  }
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("GpForecastCorrector::fit: Cholesky failed after jitter retries");

  const Eigen::VectorXd au = llt.solve(err_u);
  const Eigen::VectorXd av = llt.solve(err_v);
  gp.alpha_u_.assign(au.data(), au.data() + keep);
  gp.alpha_v_.assign(av.data(), av.data() + keep);
  return gp;
}

double GpForecastCorrector::kernel(double x, double y, double l, double t,
                                   std::size_t i) const {
  const double dx = (x - xs_[i]) / cfg_.length_x;
  const double dy = (y - ys_[i]) / cfg_.length_y;
  const double dl = (l - ls_[i]) / cfg_.length_l;
  const double dt = (t - ts_[i]) / cfg_.length_t;
  const double r = std::sqrt(dx * dx + dy * dy + dl * dl + dt * dt);
  return cfg_.sigma_f * cfg_.sigma_f * matern32(r);
}

WindVector GpForecastCorrector::predict(double x, double y, double l, double t) const {
  WindVector out;
  for (std::size_t i = 0; i < ls_.size(); ++i) {
    const double k = kernel(x, y, l, t, i);
    out.u_east += alpha_u_[i] * k;
    out.v_north += alpha_v_[i] * k;
  }
  return out;
}

GpForecastCorrector::ColumnView GpForecastCorrector::column(double x0, double y0,
                                                            double t0) const {
  ColumnView view;
  view.inv_len_l2_ = 1.0 / (cfg_.length_l * cfg_.length_l);
  view.sigma_f2_ = cfg_.sigma_f * cfg_.sigma_f;
  const std::size_t n = ls_.size();
  view.base_dist2_.resize(n);
  view.l_train_ = ls_;
  view.alpha_u_ = alpha_u_;
  view.alpha_v_ = alpha_v_;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = (x0 - xs_[i]) / cfg_.length_x;
    const double dy = (y0 - ys_[i]) / cfg_.length_y;
    const double dt = (t0 - ts_[i]) / cfg_.length_t;
    view.base_dist2_[i] = dx * dx + dy * dy + dt * dt;
  }
  return view;
}

void GpForecastCorrector::ColumnView::value_slope(double l, double& u, double& v,
                                                  double& du, double& dv) const {
  u = v = du = dv = 0.0;
  for (std::size_t i = 0; i < l_train_.size(); ++i) {
    const double dl = l - l_train_[i];
    const double r2 = base_dist2_[i] + dl * dl * inv_len_l2_;
    const double r = std::sqrt(r2);
    const double e = std::exp(-kSqrt3 * r);
    const double k = sigma_f2_ * (1.0 + kSqrt3 * r) * e;
    // dk/dl = -3 sigma_f^2 e^{-sqrt3 r} (l - l_i) / length_l^2
    const double dk = -3.0 * sigma_f2_ * e * dl * inv_len_l2_;
    u += alpha_u_[i] * k;
    v += alpha_v_[i] * k;
    du += alpha_u_[i] * dk;
    dv += alpha_v_[i] * dk;
  }
}

}  // namespace hab::wind

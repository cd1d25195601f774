#include "habkeep/wind_model.hpp"

#include <cmath>
#include <string>

namespace hab::wind {

const char* wind_model_name(WindModelKind kind) {
  switch (kind) {
    case WindModelKind::kForecast: return "forecast";
    case WindModelKind::kColumn: return "column";
    case WindModelKind::kGpColumn: return "gp-column";
    case WindModelKind::kBlend: return "blend";
  }
  return "?";
}

WindModelKind wind_model_from_name(const std::string& name) {
  if (name == "forecast") return WindModelKind::kForecast;
  if (name == "column") return WindModelKind::kColumn;
  if (name == "gp-column") return WindModelKind::kGpColumn;
  if (name == "blend") return WindModelKind::kBlend;
  throw std::invalid_argument("unknown wind model: " + name);
}

WindVector wind_model_at(const WindModelConfig& cfg, const BalloonState& anchor,
                         const GpForecastCorrector* gp,
                         const SyntheticWindField& field, double x, double y,
                         double l, double t) {
  const bool needs_gp = cfg.kind == WindModelKind::kGpColumn ||
                        cfg.kind == WindModelKind::kBlend;
  if (needs_gp && gp == nullptr)
    throw std::invalid_argument("wind_model_at: GP corrector required for this model");

  switch (cfg.kind) {
    case WindModelKind::kForecast:
      return field.at(x, y, l, t);
    case WindModelKind::kColumn:
      return field.at(anchor.x, anchor.y, l, anchor.t);
    case WindModelKind::kGpColumn: {
      WindVector w = field.at(anchor.x, anchor.y, l, anchor.t);
      const WindVector g = gp->predict(anchor.x, anchor.y, l, anchor.t);
      w.u_east += g.u_east;
      w.v_north += g.v_north;
      return w;
    }
    case WindModelKind::kBlend: {
      const WindVector f = field.at(x, y, l, t);
      WindVector c = field.at(anchor.x, anchor.y, l, anchor.t);
      const WindVector g = gp->predict(anchor.x, anchor.y, l, anchor.t);
      c.u_east += g.u_east;
      c.v_north += g.v_north;
      const double a = cfg.blend_alpha;
      return {a * f.u_east + (1.0 - a) * c.u_east,
              a * f.v_north + (1.0 - a) * c.v_north};
    }
  }
  return {};
}

PlannerWindModel::PlannerWindModel(const WindModelConfig& cfg,
                                   const SyntheticWindField& field,
                                   const GpForecastCorrector* gp, double x0,
                                   double y0, double t0, bool use_cache)
    : cfg_(cfg), field_(&field) {
  const bool needs_gp = cfg.kind == WindModelKind::kGpColumn ||
                        cfg.kind == WindModelKind::kBlend;
  if (needs_gp && gp == nullptr)
    throw std::invalid_argument("PlannerWindModel: GP corrector required for this model");
  column_ctx_ = field.column_context(x0, y0, t0);
  if (needs_gp) {
    gp_column_ = gp->column(x0, y0, t0);
    has_gp_ = true;
  }
  const bool uses_column = cfg.kind != WindModelKind::kForecast;
  if (uses_column && use_cache) build_cache();
}

void PlannerWindModel::column_value_slope_exact(double l, double& u, double& v,
                                                double& du, double& dv) const {
  field_->column_value_slope(column_ctx_, l, u, v, du, dv);
  if (has_gp_) {
    double gu, gv, gdu, gdv;
    gp_column_.value_slope(l, gu, gv, gdu, gdv);
    u += gu;
    v += gv;
    du += gdu;
    dv += gdv;
  }
}

void PlannerWindModel::build_cache() {
  constexpr int kNodes = 2048;
  cache_step_ = (cache_hi_ - cache_lo_) / (kNodes - 1);
  node_u_.resize(kNodes);
  node_v_.resize(kNodes);
  node_du_.resize(kNodes);
  node_dv_.resize(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    const double l = cache_lo_ + cache_step_ * i;
    column_value_slope_exact(l, node_u_[static_cast<std::size_t>(i)],
                             node_v_[static_cast<std::size_t>(i)],
                             node_du_[static_cast<std::size_t>(i)],
                             node_dv_[static_cast<std::size_t>(i)]);
  }
  cached_ = true;
}

void PlannerWindModel::column_value_slope(double l, double& u, double& v,
                                          double& du, double& dv) const {
  if (!cached_ || l < cache_lo_ || l > cache_hi_) {
    column_value_slope_exact(l, u, v, du, dv);
    return;
  }
  const double pos = (l - cache_lo_) / cache_step_;
  auto i = static_cast<std::size_t>(pos);
  const std::size_t last = node_u_.size() - 2;
  if (i > last) i = last;
  const double tt = pos - static_cast<double>(i);
  const double t2 = tt * tt;
  const double t3 = t2 * tt;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + tt;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  // derivative of the Hermite basis in l
  const double g00 = (6.0 * t2 - 6.0 * tt) / cache_step_;
  const double g10 = (3.0 * t2 - 4.0 * tt + 1.0);
  const double g01 = (-6.0 * t2 + 6.0 * tt) / cache_step_;
  const double g11 = (3.0 * t2 - 2.0 * tt);
  u = h00 * node_u_[i] + h10 * cache_step_ * node_du_[i] + h01 * node_u_[i + 1] +
      h11 * cache_step_ * node_du_[i + 1];
  v = h00 * node_v_[i] + h10 * cache_step_ * node_dv_[i] + h01 * node_v_[i + 1] +
      h11 * cache_step_ * node_dv_[i + 1];
  du = g00 * node_u_[i] + g10 * node_du_[i] + g01 * node_u_[i + 1] +
       g11 * node_du_[i + 1];
  dv = g00 * node_v_[i] + g10 * node_dv_[i] + g01 * node_v_[i + 1] +
       g11 * node_dv_[i + 1];
}

}  // namespace hab::wind

#pragma once

#include <stdexcept>
#include <vector>

#include "habkeep/autodiff.hpp"
#include "habkeep/balloon.hpp"
#include "habkeep/gp_corrector.hpp"
#include "habkeep/wind_field.hpp"

namespace hab::wind {

// Planner-side wind approximations.
//   kForecast: the forecast field itself, queried along the rollout.
//   kColumn:   forecast frozen at the replan anchor; only pressure varies.
//   kGpColumn: anchored column plus the GP forecast-error correction.
//   kBlend:    alpha * forecast + (1 - alpha) * GP column.
enum class WindModelKind { kForecast = 0, kColumn = 1, kGpColumn = 2, kBlend = 3 };

struct WindModelConfig {
  WindModelKind kind = WindModelKind::kGpColumn;
  double blend_alpha = 0.5;
};

const char* wind_model_name(WindModelKind kind);
WindModelKind wind_model_from_name(const std::string& name);

// Exact closed-form evaluation of the selected model. The anchor supplies
// the frozen (x0, y0, t0); a GP corrector is required for kGpColumn/kBlend.
WindVector wind_model_at(const WindModelConfig& cfg, const BalloonState& anchor,
                         const GpForecastCorrector* gp,
                         const SyntheticWindField& field, double x, double y,
                         double l, double t);

// Wind model bound to one replan: anchor frozen, GP column prepared, and an
// optional dense value/slope table over the pressure band so rollouts avoid
// re-evaluating the GP sum per substep. Queries outside the table fall back
// to the exact evaluation.
class PlannerWindModel {
 public:
  PlannerWindModel(const WindModelConfig& cfg, const SyntheticWindField& field,
                   const GpForecastCorrector* gp, double x0, double y0, double t0,
                   bool use_cache = true);

  WindModelKind kind() const { return cfg_.kind; }

  template <class S>
  void eval(const S& x, const S& y, const S& l, double t, S& u, S& v) const {
    switch (cfg_.kind) {
      case WindModelKind::kForecast:
        field_->eval(x, y, l, t, u, v);
        return;
      case WindModelKind::kColumn:
      case WindModelKind::kGpColumn:
        eval_column_lifted(l, u, v);
        return;
      case WindModelKind::kBlend: {
        S fu(0.0), fv(0.0);
        field_->eval(x, y, l, t, fu, fv);
        S cu(0.0), cv(0.0);
        eval_column_lifted(l, cu, cv);
        const double a = cfg_.blend_alpha;
        u = a * fu + (1.0 - a) * cu;
        v = a * fv + (1.0 - a) * cv;
        return;
      }
    }
  }

  // Exact anchored-column value and d/dl (forecast column + GP correction).
  void column_value_slope_exact(double l, double& u, double& v, double& du,
                                double& dv) const;

  // Cache-or-exact, what rollouts actually evaluate.
  void column_value_slope(double l, double& u, double& v, double& du,
                          double& dv) const;

 private:
  template <class S>
  void eval_column_lifted(const S& l, S& u, S& v) const {
    double uu, vv, du, dv;
    column_value_slope(value_of(l), uu, vv, du, dv);
    u = lift_unary(l, uu, du);
    v = lift_unary(l, vv, dv);
  }

  void build_cache();

  WindModelConfig cfg_;
  const SyntheticWindField* field_;
  SyntheticWindField::ColumnContext column_ctx_;
  GpForecastCorrector::ColumnView gp_column_;
  bool has_gp_ = false;

  bool cached_ = false;
  double cache_lo_ = 4500.0;
  double cache_hi_ = 8000.0;
  double cache_step_ = 1.0;
  std::vector<double> node_u_, node_v_, node_du_, node_dv_;
};

}  // namespace hab::wind

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "habkeep/autodiff.hpp"
#include "habkeep/balloon.hpp"
#include "habkeep/control.hpp"
#include "habkeep/dynamics.hpp"
#include "habkeep/wind_model.hpp"

namespace hab::difftrace {

struct RolloutConfig {
  dyn::StepOptions step;  // fidelity, surrogate ACS, solar, substeps
  ctrl::CostConfig cost;
};

struct RolloutError : std::runtime_error {
  explicit RolloutError(int step_index)
      : std::runtime_error("rollout: non-finite cost at step " +
                           std::to_string(step_index)),
        step(step_index) {}
  int step;
};

// Discounted rollout objective of the raw plan: squash -> power gate ->
// H discrete updates -> sum gamma^k c(x_{k+1}). The same code evaluates the
// plain value (S = double) and records the tape (S = ad::Rev), so the two
// paths agree bit for bit.
template <class S>
S rollout_cost(std::span<const S> raw, const BalloonState& x0,
               const wind::PlannerWindModel& wm, const BalloonParams& p,
               const RolloutConfig& rc) {
  BalloonStateT<S> s;
  s.x = S(x0.x);
  s.y = S(x0.y);
  s.l = S(x0.l);
  s.n = S(x0.n);
  s.T = S(x0.T);
  s.E = S(x0.E);
  s.V = S(x0.V);
  s.p_env = S(x0.p_env);
  s.t = x0.t;
  bool latched = x0.gate_latched;

  const auto wind_at = [&wm](const S& x, const S& y, const S& l, double t, S& u,
                             S& v) { wm.eval(x, y, l, t, u, v); };

  S total(0.0);
  double discount = 1.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    S u = ctrl::squash(raw[k]);
    latched = power_gate_update(value_of(s.E) / p.E_max, latched);
    if (latched && value_of(u) < 0.0) u = S(0.0);  // stop-gradient when blocked
    s = dyn::step(s, wind_at, u, p, rc.step);
    total += discount * ctrl::stage_cost(s, p.E_max, rc.cost);
    if (!std::isfinite(value_of(total))) throw RolloutError(static_cast<int>(k));
    discount *= rc.cost.discount;
  }
  return total;
}

// Plain evaluation of the objective.
double value_rollout(std::span<const double> raw, const BalloonState& x0,
                     const wind::PlannerWindModel& wm, const BalloonParams& p,
                     const RolloutConfig& rc);

// Plain evaluation with early exit: stage costs are nonnegative, so the
// partial sum is a lower bound; once it exceeds `bound` the true value
// cannot be the minimum and +inf is returned.
double value_rollout_bounded(std::span<const double> raw, const BalloonState& x0,
                             const wind::PlannerWindModel& wm,
                             const BalloonParams& p, const RolloutConfig& rc,
                             double bound);

struct GradientReport {
  std::vector<double> gradient;  // dJ/d raw_k, length H
  double value = 0.0;            // objective at the evaluation point
  double elapsed_seconds = 0.0;
};

// Exact gradient of the rollout objective via the reverse-mode tape.
GradientReport grad_rollout(std::span<const double> raw, const BalloonState& x0,
                            const wind::PlannerWindModel& wm,
                            const BalloonParams& p, const RolloutConfig& rc);

}  // namespace hab::difftrace

#include "habkeep/rollout.hpp"

#include <chrono>
#include <limits>

namespace hab::difftrace {

double value_rollout(std::span<const double> raw, const BalloonState& x0,
                     const wind::PlannerWindModel& wm, const BalloonParams& p,
                     const RolloutConfig& rc) {
  return rollout_cost<double>(raw, x0, wm, p, rc);
}

double value_rollout_bounded(std::span<const double> raw, const BalloonState& x0,
                             const wind::PlannerWindModel& wm,
                             const BalloonParams& p, const RolloutConfig& rc,
                             double bound) {
  BalloonStateT<double> s;
  s.x = x0.x;
  s.y = x0.y;
  s.l = x0.l;
  s.n = x0.n;
  s.T = x0.T;
  s.E = x0.E;
  s.V = x0.V;
  s.p_env = x0.p_env;
  s.t = x0.t;
  bool latched = x0.gate_latched;
  const auto wind_at = [&wm](const double& x, const double& y, const double& l,
                             double t, double& u, double& v) {
    wm.eval(x, y, l, t, u, v);
  };
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    double u = ctrl::squash(raw[k]);
    latched = power_gate_update(s.E / p.E_max, latched);
    if (latched && u < 0.0) u = 0.0;
    s = dyn::step(s, wind_at, u, p, rc.step);
    total += discount * ctrl::stage_cost(s, p.E_max, rc.cost);
    if (!std::isfinite(total)) throw RolloutError(static_cast<int>(k));
    if (total > bound) return std::numeric_limits<double>::infinity();
    discount *= rc.cost.discount;
  }
  return total;
}

GradientReport grad_rollout(std::span<const double> raw, const BalloonState& x0,
                            const wind::PlannerWindModel& wm,
                            const BalloonParams& p, const RolloutConfig& rc) {
  const auto start = std::chrono::steady_clock::now();

  thread_local ad::Tape tape;
  thread_local std::vector<double> adjoint;
  tape.clear();
  ad::TapeScope scope(tape);

  std::vector<ad::Rev> vars;
  vars.reserve(raw.size());
  for (double r : raw) vars.push_back(ad::Rev::input(r));

  const ad::Rev objective =
      rollout_cost<ad::Rev>(std::span<const ad::Rev>(vars), x0, wm, p, rc);
  tape.backward(objective.idx, adjoint);

  GradientReport report;
  report.value = objective.v;
  report.gradient.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k)
    report.gradient[k] =
        objective.idx < 0 ? 0.0 : adjoint[static_cast<std::size_t>(vars[k].idx)];
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace hab::difftrace

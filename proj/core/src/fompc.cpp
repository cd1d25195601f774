#include "habkeep/fompc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "habkeep/atmosphere.hpp"
#include "habkeep/control.hpp"

namespace hab::fompc {

void FompcConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("fompc: horizon must be >= 1");
  if (replan_interval < 1 || replan_interval > horizon)
    throw std::invalid_argument("fompc: need 1 <= replan_interval <= horizon");
  if (!(discount > 0.0 && discount <= 1.0))
    throw std::invalid_argument("fompc: discount must be in (0, 1]");
  if (num_inits < 0) throw std::invalid_argument("fompc: num_inits must be >= 0");
  if (!(step_size > 0.0) || !(tolerance > 0.0) || max_iters < 0)
    throw std::invalid_argument("fompc: optimizer constants must be positive");
}

namespace {

double normal_draw(SplitMix64& rng, double sigma) {
  // Box-Muller; one value per call keeps the draw order easy to reason about
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

difftrace::RolloutConfig rollout_config(const FompcConfig& cfg,
                                        const SolarConfig& solar,
                                        const dyn::SurrogateRates& surrogate) {
  difftrace::RolloutConfig rc;
  rc.step.fidelity = cfg.fidelity;
  rc.step.acs = AcsMode::kSurrogate;
  rc.step.surrogate = surrogate;
  rc.step.solar = solar;
  rc.cost.discount = cfg.discount;
  rc.cost.radius_scale = cfg.cost_radius;
  return rc;
}

}  // namespace

ReachTable altitude_reach_table(const BalloonState& x0, const BalloonParams& p,
                                const FompcConfig& cfg, const SolarConfig& solar,
                                int grid) {
  const auto [l_lo, l_hi] = p.pressure_band();
  const double h_lo = atmo::altitude_at_pressure(l_hi);  // pressure inverts altitude
  const double h_hi = atmo::altitude_at_pressure(l_lo);

  ReachTable table;
  table.altitudes.resize(static_cast<std::size_t>(grid));
  table.steps.assign(static_cast<std::size_t>(grid), cfg.horizon);
  for (int i = 0; i < grid; ++i)
    table.altitudes[static_cast<std::size_t>(i)] =
        h_lo + (h_hi - h_lo) * i / (grid - 1);
  table.current_altitude = atmo::altitude_at_pressure(x0.l);

  dyn::StepOptions opt;
  opt.fidelity = cfg.fidelity;
  opt.acs = AcsMode::kSurrogate;
  opt.surrogate = dyn::calibrate_surrogate_rates(p);
  opt.solar = solar;

  const auto no_wind = [](const double&, const double&, const double&, double,
                          double& u, double& v) { u = v = 0.0; };

  const double sat = ctrl::squash(cfg.init_raw_magnitude);
  // +sat vents (ascend), -sat pumps (descend)
  for (const double dir : {+1.0, -1.0}) {
    BalloonState s = x0;
    int stalled_at = cfg.horizon;
    for (int k = 1; k <= cfg.horizon; ++k) {
      const double l_before = s.l;
      s = dyn::step(s, no_wind, dir * sat, p, opt);
      if (std::abs(s.l - l_before) < 0.05 && stalled_at == cfg.horizon)
        stalled_at = k;  // pinned at a ballonet limit; no further progress
      const double h = atmo::altitude_at_pressure(s.l);
      for (int i = 0; i < grid; ++i) {
        const double target = table.altitudes[static_cast<std::size_t>(i)];
        const bool ahead = dir > 0 ? target > table.current_altitude
                                   : target < table.current_altitude;
        const bool crossed = dir > 0 ? h >= target : h <= target;
        auto& entry = table.steps[static_cast<std::size_t>(i)];
        if (ahead && crossed && entry == cfg.horizon && k < entry) entry = k;
      }
    }
    // unreachable targets saturate only until progress stops
    for (int i = 0; i < grid; ++i) {
      const double target = table.altitudes[static_cast<std::size_t>(i)];
      const bool ahead = dir > 0 ? target > table.current_altitude
                                 : target < table.current_altitude;
      auto& entry = table.steps[static_cast<std::size_t>(i)];
      if (ahead && entry == cfg.horizon) entry = stalled_at;
    }
  }
  // targets at the current altitude need no travel
  for (int i = 0; i < grid; ++i)
    if (std::abs(table.altitudes[static_cast<std::size_t>(i)] -
                 table.current_altitude) < 1.0)
      table.steps[static_cast<std::size_t>(i)] = 0;
  return table;
}

std::vector<ControlPlan> heuristic_inits(const BalloonState& x0,
                                         const BalloonParams& p,
                                         const FompcConfig& cfg,
                                         const SolarConfig& solar,
                                         const std::optional<ControlPlan>& previous,
                                         SplitMix64& rng) {
  const auto h = static_cast<std::size_t>(cfg.horizon);
  std::vector<ControlPlan> out;
  out.reserve(static_cast<std::size_t>(cfg.num_inits) + 2);

  const ReachTable table = altitude_reach_table(x0, p, cfg, solar);
  const double h_min = table.altitudes.front();
  const double h_max = table.altitudes.back();

  for (int c = 0; c < cfg.num_inits; ++c) {
    const double target = rng.uniform(h_min, h_max);
    // nearest grid entry
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.altitudes.size(); ++i)
      if (std::abs(table.altitudes[i] - target) <
          std::abs(table.altitudes[best] - target))
        best = i;
    const int travel = table.steps[best];
    const double dir = table.altitudes[best] > table.current_altitude ? 1.0 : -1.0;
    ControlPlan plan;
    plan.raw.resize(h);
    for (std::size_t k = 0; k < h; ++k)
      plan.raw[k] = static_cast<int>(k) < travel
                        ? dir * cfg.init_raw_magnitude
                        : normal_draw(rng, cfg.perturb_sigma);
    out.push_back(std::move(plan));
  }

  if (previous.has_value()) {
    ControlPlan shifted;
    shifted.raw.resize(h);
    const auto m = static_cast<std::size_t>(cfg.replan_interval);
    for (std::size_t k = 0; k < h; ++k)
      shifted.raw[k] = k + m < h
                           ? previous->raw[k + m]
                           : ctrl::unsquash(rng.uniform(-cfg.coast_bound,
                                                        cfg.coast_bound));
    out.push_back(std::move(shifted));
  }

  ControlPlan coast;
  coast.raw.resize(h);
  for (std::size_t k = 0; k < h; ++k)
    coast.raw[k] = ctrl::unsquash(rng.uniform(-cfg.coast_bound, cfg.coast_bound));
  out.push_back(std::move(coast));

  return out;
}

std::size_t select_init(std::span<const ControlPlan> candidates,
                        const BalloonState& x0, const wind::PlannerWindModel& wm,
                        const BalloonParams& p, const difftrace::RolloutConfig& rc,
                        std::vector<double>* costs) {
  if (candidates.empty()) throw std::invalid_argument("select_init: no candidates");
  std::size_t best = candidates.size();
  double best_cost = std::numeric_limits<double>::infinity();
  if (costs) costs->assign(candidates.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double cost;
    try {
      cost = difftrace::value_rollout_bounded(candidates[i].raw, x0, wm, p, rc,
                                              best_cost);
    } catch (const difftrace::RolloutError&) {
      continue;
    }
    if (costs) (*costs)[i] = cost;
    if (cost < best_cost) {  // strict: ties keep the earliest index
      best_cost = cost;
      best = i;
    }
  }
  if (best == candidates.size())
    throw std::runtime_error("select_init: every candidate evaluated non-finite");
  return best;
}

OptimizeResult optimize(const ControlPlan& init, const Objective& objective,
                        const FompcConfig& cfg, OptimizeMode mode,
                        bool record_trace) {
  const auto start = std::chrono::steady_clock::now();
  OptimizeResult res;
  res.plan = init;

  std::vector<double> current = init.raw;
  std::vector<double> best = init.raw;
  double best_cost = std::numeric_limits<double>::infinity();
  double grad_norm = 0.0;
  int updates = 0;
  bool have_init_cost = false;

  for (int s = 0; s <= cfg.max_iters; ++s) {
    ObjectiveEval eval;
    try {
      eval = objective(current);
    } catch (const std::exception&) {
      res.diag.aborted_nonfinite = true;
      break;
    }
    if (!std::isfinite(eval.value)) {
      res.diag.aborted_nonfinite = true;
      break;
    }
    if (!have_init_cost) {
      res.diag.init_cost = eval.value;
      have_init_cost = true;
    }
    if (mode == OptimizeMode::kSafeguarded && eval.value < best_cost) {
      best_cost = eval.value;
      best = current;
    }
    if (mode == OptimizeMode::kTraceExact) best_cost = eval.value;

    double sq = 0.0;
    for (double g : eval.gradient) sq += g * g;
    grad_norm = std::sqrt(sq);
    if (!std::isfinite(grad_norm)) {
      res.diag.aborted_nonfinite = true;
      break;
    }
    if (grad_norm < cfg.tolerance) break;
    if (s == cfg.max_iters) break;

    for (std::size_t k = 0; k < current.size(); ++k)
      current[k] -= cfg.step_size * (eval.gradient[k] / grad_norm);
    ++updates;
    if (record_trace) res.trace.push_back(current);
  }

  res.diag.iterations = updates;
  res.diag.exit_grad_norm = grad_norm;
  if (mode == OptimizeMode::kSafeguarded) {
    res.plan.raw = best;
    res.diag.final_cost = best_cost;
  } else {
    res.plan.raw = current;
    res.diag.final_cost = best_cost;  // cost at the last evaluated iterate
  }
  res.diag.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return res;
}

FompcController::FompcController(const FompcConfig& cfg,
                                 const BalloonParams& params,
                                 const SolarConfig& solar,
                                 const wind::SyntheticWindField* forecast,
                                 std::uint64_t episode_seed,
                                 const StepTimebase& timebase)
    : cfg_(cfg),
      params_(params),
      solar_(solar),
      forecast_(forecast),
      seed_(episode_seed),
      timebase_(timebase),
      surrogate_(dyn::calibrate_surrogate_rates(params)) {
  cfg_.validate();
}

std::vector<double> FompcController::plan_actions(
    const BalloonState& x0, std::span<const wind::WindObservation> errors,
    int replan_index) {
  const auto start = std::chrono::steady_clock::now();

  const bool needs_gp = cfg_.wind_model.kind == wind::WindModelKind::kGpColumn ||
                        cfg_.wind_model.kind == wind::WindModelKind::kBlend;
  wind::GpForecastCorrector gp;
  if (needs_gp) gp = wind::GpForecastCorrector::fit(errors, cfg_.gp);

  const wind::PlannerWindModel wm(cfg_.wind_model, *forecast_,
                                  needs_gp ? &gp : nullptr, x0.x, x0.y, x0.t,
                                  cfg_.use_column_cache);
  difftrace::RolloutConfig rc = rollout_config(cfg_, solar_, surrogate_);
  rc.step.dt_sub = timebase_.dt_sub;
  rc.step.substeps = timebase_.substeps;

  SplitMix64 rng = substream(seed_, "fompc-candidates",
                             static_cast<std::uint64_t>(replan_index));
  const std::vector<ControlPlan> candidates =
      heuristic_inits(x0, params_, cfg_, solar_, previous_, rng);

  PlannerDiagnostics diag;
  ControlPlan chosen;
  try {
    const std::size_t best_idx = select_init(candidates, x0, wm, params_, rc);
    chosen = candidates[best_idx];
    diag.chosen_index = static_cast<int>(best_idx);
    if (best_idx < static_cast<std::size_t>(cfg_.num_inits))
      diag.chosen_init = InitKind::kRandom;
    else if (previous_.has_value() &&
             best_idx == static_cast<std::size_t>(cfg_.num_inits))
      diag.chosen_init = InitKind::kPrevious;
    else
      diag.chosen_init = InitKind::kCoast;

    const Objective objective = [&](std::span<const double> raw) {
      const difftrace::GradientReport rep =
          difftrace::grad_rollout(raw, x0, wm, params_, rc);
      return ObjectiveEval{rep.value, rep.gradient};
    };
    OptimizeResult opt = optimize(chosen, objective, cfg_);
    opt.diag.chosen_init = diag.chosen_init;
    opt.diag.chosen_index = diag.chosen_index;
    diag = opt.diag;
    chosen = std::move(opt.plan);
  } catch (const std::exception&) {
    // optimizer failure: fall back to the coast candidate
    diag.aborted_nonfinite = true;
    chosen = candidates.back();
  }

  previous_ = chosen;
  diag.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  diags_.push_back(diag);

  std::vector<double> actions(static_cast<std::size_t>(cfg_.replan_interval));
  for (std::size_t k = 0; k < actions.size(); ++k)
    actions[k] = ctrl::squash(chosen.raw[k]);
  return actions;
}

std::vector<double> discretize_plan(std::span<const double> actions) {
  std::vector<double> out(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const double u = actions[k];
    if (u > 0.5)
      out[k] = 1.0;
    else if (u < -0.5)
      out[k] = -1.0;
    else
      out[k] = 0.0;
  }
  return out;
}

std::vector<double> alternation_pattern(double action, int substeps) {
  std::vector<double> out(static_cast<std::size_t>(substeps), 0.0);
  const double sign = action >= 0.0 ? 1.0 : -1.0;
  const int q = std::min(
      substeps, static_cast<int>(std::lround(std::abs(action) * substeps)));
  int emitted = 0;
  for (int j = 0; j < substeps; ++j) {
    const int next = ((j + 1) * q) / substeps;
    if (next > emitted) {
      out[static_cast<std::size_t>(j)] = sign;
      emitted = next;
    }
  }
  return out;
}

double baseline_greedy_column(const BalloonState& state,
                              const wind::SyntheticWindField& field,
                              const wind::GpForecastCorrector& gp,
                              const BalloonParams& params, double deadband_pa,
                              int levels) {
  const double dist = std::hypot(state.x, state.y);
  if (dist < 1.0) return 0.0;  // at the target, no preferred direction

  const auto [l_lo, l_hi] = params.pressure_band();
  const wind::WindModelConfig cfg{wind::WindModelKind::kGpColumn, 0.5};
  double best_score = -std::numeric_limits<double>::infinity();
  double best_level = state.l;
  for (int i = 0; i < levels; ++i) {
    const double level = l_lo + (l_hi - l_lo) * i / (levels - 1);
    const wind::WindVector w =
        wind_model_at(cfg, state, &gp, field, state.x, state.y, level, state.t);
    // inward radial component: projection onto the unit vector toward the target
    const double score = -(w.u_east * state.x + w.v_north * state.y) / dist;
    if (score > best_score) {
      best_score = score;
      best_level = level;
    }
  }
  if (std::abs(best_level - state.l) <= deadband_pa) return 0.0;
  return best_level < state.l ? 1.0 : -1.0;  // lower pressure: vent to ascend
}

}  // namespace hab::fompc

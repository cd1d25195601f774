#include "habkeep/agents.hpp"

#include <stdexcept>

namespace hab::harness {

std::vector<wind::WindObservation> forecast_errors(
    std::span<const WindSample> observations, const wind::SyntheticWindField& field,
    int capacity) {
  const std::size_t keep =
      std::min(observations.size(), static_cast<std::size_t>(capacity));
  const std::size_t first = observations.size() - keep;
  std::vector<wind::WindObservation> errors;
  errors.reserve(keep);
  for (std::size_t i = first; i < observations.size(); ++i) {
    const WindSample& s = observations[i];
    const wind::WindVector w0 = field.at(s.x, s.y, s.l, s.t);
    errors.push_back({s.x, s.y, s.l, s.t,
                      {s.observed.u_east - w0.u_east, s.observed.v_north - w0.v_north}});
  }
  return errors;
}

void GreedyColumnAgent::begin_episode(const EpisodeContext& ctx) { ctx_ = ctx; }

AgentAction GreedyColumnAgent::act(const BalloonState& state,
                                   std::span<const WindSample> observations,
                                   int /*step_index*/) {
  const auto errors =
      forecast_errors(observations, *ctx_.forecast, ctx_.fompc.gp.capacity);
  const wind::GpForecastCorrector gp =
      wind::GpForecastCorrector::fit(errors, ctx_.fompc.gp);
  return {fompc::baseline_greedy_column(state, *ctx_.forecast, gp, ctx_.params), {}};
}

void FompcAgent::begin_episode(const EpisodeContext& ctx) {
  ctx_ = ctx;
  fompc::StepTimebase timebase;
  timebase.substeps = ctx.substeps;
  timebase.dt_sub = ctx.dt_sub;
  controller_ = std::make_unique<fompc::FompcController>(
      ctx.fompc, ctx.params, ctx.solar, ctx.forecast, ctx.seed, timebase);
  queued_.clear();
  cursor_ = 0;
}

AgentAction FompcAgent::act(const BalloonState& state,
                            std::span<const WindSample> observations,
                            int step_index) {
  const int m = ctx_.fompc.replan_interval;
  if (step_index % m == 0) {
    const auto errors =
        forecast_errors(observations, *ctx_.forecast, ctx_.fompc.gp.capacity);
    queued_ = controller_->plan_actions(state, errors, step_index / m);
    if (mode_ == Discretize::kRound) queued_ = fompc::discretize_plan(queued_);
    cursor_ = 0;
  }
  if (cursor_ >= queued_.size())
    throw std::runtime_error("fompc agent: ran out of planned actions");
  const double u = queued_[cursor_++];
  if (mode_ == Discretize::kAlternate)
    return {u, fompc::alternation_pattern(u, ctx_.substeps)};
  return {u, {}};
}

std::span<const fompc::PlannerDiagnostics> FompcAgent::planner_diagnostics() const {
  if (!controller_) return {};
  return controller_->diagnostics();
}

std::unique_ptr<Agent> make_agent(const std::string& name) {
  if (name == "fompc") return std::make_unique<FompcAgent>();
  if (name == "discretized-fompc")
    return std::make_unique<FompcAgent>(FompcAgent::Discretize::kRound);
  if (name == "alternating-fompc")
    return std::make_unique<FompcAgent>(FompcAgent::Discretize::kAlternate);
  if (name == "greedy-column") return std::make_unique<GreedyColumnAgent>();
  if (name == "coast") return std::make_unique<CoastAgent>();
  if (name == "pump") return std::make_unique<PumpAgent>();
  throw std::invalid_argument("unknown agent: " + name);
}

}  // namespace hab::harness

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "habkeep/balloon.hpp"
#include "habkeep/gp_corrector.hpp"
#include "habkeep/rng.hpp"
#include "habkeep/rollout.hpp"
#include "habkeep/wind_model.hpp"

namespace hab::fompc {

struct FompcConfig {
  int horizon = 240;            // H control steps (12 h)
  int replan_interval = 24;     // m steps applied before replanning (72 min)
  double discount = 0.99;       // gamma
  int num_inits = 100;          // random candidates per replan
  Fidelity fidelity = Fidelity::kPhi4;
  wind::WindModelConfig wind_model;  // defaults to the GP column
  wind::GpConfig gp;
  double step_size = 1.0;       // eta
  int max_iters = 100;          // S_max
  double tolerance = 1e-7;      // epsilon on the gradient norm
  double cost_radius = 50.0;    // R in the stage cost
  double coast_bound = 0.2;     // coast actions ~ Unif(-coast_bound, coast_bound)
  double init_raw_magnitude = 4.0;  // near-saturated |raw| for altitude moves
  double perturb_sigma = 0.1;   // raw-space perturbation after reaching target
  bool use_column_cache = true;

  void validate() const;
};

struct ControlPlan {
  std::vector<double> raw;  // unconstrained; squash(raw[k]) is the action
};

enum class InitKind { kRandom = 0, kPrevious = 1, kCoast = 2 };

struct PlannerDiagnostics {
  InitKind chosen_init = InitKind::kRandom;
  int chosen_index = 0;
  double init_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  double exit_grad_norm = 0.0;
  double wall_time_s = 0.0;
  bool aborted_nonfinite = false;
};

// ---------------------------------------------------------------------------
// Plan initialization heuristics
// ---------------------------------------------------------------------------

// Control steps needed to reach each of `grid` target altitudes from the
// current state under saturated vent/pump, by simulating the vertical
// dynamics. Entries behind the direction of travel or not reached within
// `horizon` steps hold `horizon`.
struct ReachTable {
  std::vector<double> altitudes;  // m, ascending
  std::vector<int> steps;         // control steps to first crossing
  double current_altitude = 0.0;
};

ReachTable altitude_reach_table(const BalloonState& x0, const BalloonParams& p,
                                const FompcConfig& cfg, const SolarConfig& solar,
                                int grid = 17);

// num_inits random altitude-seeking candidates, the shifted previous plan
// (when present), and a coast plan, in that order.
std::vector<ControlPlan> heuristic_inits(const BalloonState& x0,
                                         const BalloonParams& p,
                                         const FompcConfig& cfg,
                                         const SolarConfig& solar,
                                         const std::optional<ControlPlan>& previous,
                                         SplitMix64& rng);

// Index of the lowest-cost candidate (ties to the earliest). Throws when
// every candidate evaluates non-finite.
std::size_t select_init(std::span<const ControlPlan> candidates,
                        const BalloonState& x0, const wind::PlannerWindModel& wm,
                        const BalloonParams& p, const difftrace::RolloutConfig& rc,
                        std::vector<double>* costs = nullptr);

// ---------------------------------------------------------------------------
// First-order gradient descent (normalized step), with a best-iterate
// safeguard so the returned cost never exceeds the initialization cost.
// kTraceExact reproduces the bare update rule and returns the final iterate.
// ---------------------------------------------------------------------------

struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
};
using Objective = std::function<ObjectiveEval(std::span<const double>)>;

enum class OptimizeMode { kSafeguarded, kTraceExact };

struct OptimizeResult {
  ControlPlan plan;
  PlannerDiagnostics diag;
  std::vector<std::vector<double>> trace;  // iterates, kTraceExact only
};

OptimizeResult optimize(const ControlPlan& init, const Objective& objective,
                        const FompcConfig& cfg,
                        OptimizeMode mode = OptimizeMode::kSafeguarded,
                        bool record_trace = false);

// ---------------------------------------------------------------------------
// Receding-horizon controller
// ---------------------------------------------------------------------------

struct StepTimebase {
  double dt_sub = dyn::kSubstepDt;
  int substeps = dyn::kSubsteps;
};

class FompcController {
 public:
  FompcController(const FompcConfig& cfg, const BalloonParams& params,
                  const SolarConfig& solar, const wind::SyntheticWindField* forecast,
                  std::uint64_t episode_seed, const StepTimebase& timebase = {});

  // Run one replan from the current state and return the next
  // replan_interval actions (already squashed; the environment applies the
  // power gate at execution time). Falls back to a coast plan if the
  // optimizer fails.
  std::vector<double> plan_actions(const BalloonState& x0,
                                   std::span<const wind::WindObservation> errors,
                                   int replan_index);

  const std::vector<PlannerDiagnostics>& diagnostics() const { return diags_; }
  const FompcConfig& config() const { return cfg_; }
  const std::optional<ControlPlan>& stored_plan() const { return previous_; }

 private:
  FompcConfig cfg_;
  BalloonParams params_;
  SolarConfig solar_;
  const wind::SyntheticWindField* forecast_;
  std::uint64_t seed_;
  StepTimebase timebase_;
  dyn::SurrogateRates surrogate_;
  std::optional<ControlPlan> previous_;
  std::vector<PlannerDiagnostics> diags_;
};

// ---------------------------------------------------------------------------
// Plan re-discretization
// ---------------------------------------------------------------------------

// Nearest-level rounding of squashed actions onto {-1, 0, +1}.
std::vector<double> discretize_plan(std::span<const double> actions);

// Approximates a continuous action as multiples of 1/M by interleaving
// saturated and zero sub-actions across the M substeps of one step.
std::vector<double> alternation_pattern(double action, int substeps);

// ---------------------------------------------------------------------------
// Non-RL baselines
// ---------------------------------------------------------------------------

inline double baseline_coast() { return 0.0; }

// Scans reachable pressure levels of the GP-corrected column, scores each by
// the wind's inward radial component, and commands a saturated action toward
// the best level, with a deadband around the current level.
double baseline_greedy_column(const BalloonState& state,
                              const wind::SyntheticWindField& field,
                              const wind::GpForecastCorrector& gp,
                              const BalloonParams& params,
                              double deadband_pa = 250.0, int levels = 21);

}  // namespace hab::fompc

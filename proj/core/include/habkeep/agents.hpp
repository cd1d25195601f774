#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "habkeep/balloon.hpp"
#include "habkeep/fompc.hpp"
#include "habkeep/wind_field.hpp"
#include "habkeep/wind_model.hpp"

namespace hab::harness {

struct EpisodeContext {
  std::uint64_t seed = 0;
  const wind::SyntheticWindField* forecast = nullptr;
  BalloonParams params;
  SolarConfig solar;
  fompc::FompcConfig fompc;
  int substeps = 18;
  double dt_sub = 10.0;
};

// Truth wind sampled at a past balloon position (what the wind sensors saw).
struct WindSample {
  double x = 0.0, y = 0.0, l = 0.0, t = 0.0;
  wind::WindVector observed;
};

struct AgentAction {
  double u = 0.0;
  std::vector<double> substep_u;  // optional per-substep schedule
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(const EpisodeContext& ctx) = 0;
  virtual AgentAction act(const BalloonState& state,
                          std::span<const WindSample> observations,
                          int step_index) = 0;
  virtual std::span<const fompc::PlannerDiagnostics> planner_diagnostics() const {
    return {};
  }
};

// Always coasts (u = 0).
class CoastAgent final : public Agent {
 public:
  std::string name() const override { return "coast"; }
  void begin_episode(const EpisodeContext&) override {}
  AgentAction act(const BalloonState&, std::span<const WindSample>, int) override {
    return {fompc::baseline_coast(), {}};
  }
};

// Adversarial power hog: pumps at full rate forever.
class PumpAgent final : public Agent {
 public:
  std::string name() const override { return "pump"; }
  void begin_episode(const EpisodeContext&) override {}
  AgentAction act(const BalloonState&, std::span<const WindSample>, int) override {
    return {-1.0, {}};
  }
};

// Per-step greedy dispatch to the pressure level whose GP-corrected column
// wind points most strongly back toward the station.
class GreedyColumnAgent final : public Agent {
 public:
  std::string name() const override { return "greedy-column"; }
  void begin_episode(const EpisodeContext& ctx) override;
  AgentAction act(const BalloonState& state,
                  std::span<const WindSample> observations,
                  int step_index) override;

 private:
  EpisodeContext ctx_;
};

// Receding-horizon FOMPC: replans every replan_interval steps and plays the
// stored actions in between. Optionally re-discretizes emitted actions.
class FompcAgent : public Agent {
 public:
  enum class Discretize { kNone, kRound, kAlternate };

  explicit FompcAgent(Discretize mode = Discretize::kNone) : mode_(mode) {}

  std::string name() const override {
    switch (mode_) {
      case Discretize::kNone: return "fompc";
      case Discretize::kRound: return "discretized-fompc";
      case Discretize::kAlternate: return "alternating-fompc";
    }
    return "fompc";
  }
  void begin_episode(const EpisodeContext& ctx) override;
  AgentAction act(const BalloonState& state,
                  std::span<const WindSample> observations,
                  int step_index) override;
  std::span<const fompc::PlannerDiagnostics> planner_diagnostics() const override;

 private:
  Discretize mode_;
  EpisodeContext ctx_;
  std::unique_ptr<fompc::FompcController> controller_;
  std::vector<double> queued_;
  std::size_t cursor_ = 0;
};

// Recent forecast errors from raw samples; at most `capacity` newest.
std::vector<wind::WindObservation> forecast_errors(
    std::span<const WindSample> observations, const wind::SyntheticWindField& field,
    int capacity);

// Factory for the benchmark CLI. Known names: fompc, discretized-fompc,
// alternating-fompc, greedy-column, coast, pump.
std::unique_ptr<Agent> make_agent(const std::string& name);

}  // namespace hab::harness

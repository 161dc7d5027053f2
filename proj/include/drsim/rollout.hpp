#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drsim/exact_dp.hpp"
#include "drsim/mdp.hpp"
#include "drsim/scenario.hpp"

// Approximate solver: a one-parameter linear policy (consume the intrinsic
// optimum plus theta times the window maximum on ordinary days, the
// closed-form threshold action on event days) and the one-step-lookahead
// rollout built on top of it. Payoff-to-go is estimated by Monte-Carlo
// simulation with common random numbers across candidate actions, so
// comparisons stay paired and reruns with one seed are bit-identical.

namespace drsim {

enum class HeuristicFeature { WindowMax };

struct LinearHeuristic {
  double theta = 0.0;  // in [0, 1]
  HeuristicFeature feature = HeuristicFeature::WindowMax;
};

struct RolloutConfig {
  int n_fit_paths = 10;     // paths behind each theta candidate
  int n_eval_paths = 1000;  // paths behind each candidate action's payoff-to-go
  std::uint64_t seed = 1;
  bool per_stage_theta = false;  // fit a theta per day instead of one scalar
};

// policy callable used by simulations: (path index, day, state) -> action
using DayPolicy = std::function<double(int, int, const State&)>;

double heuristic_feature(const ConsumptionWindow& window, HeuristicFeature feature);

// non-event day: clamp(a_B(z) + theta * feature, 0, a_hat); event day: the
// threshold action, independent of theta
double heuristic_action(const State& state, const LinearHeuristic& h,
                        const UtilityParams& params, const DrProgram& program);

// mean total payoff of the stationary heuristic per theta on shared sample
// paths; returns the maximizer (first grid entry on ties)
double fit_theta(const State& start_state, const Horizon& horizon,
                 const DrProgram& program, const UtilityParams& params,
                 const DrChain& chain, const ZSet& z_set, const RolloutConfig& config,
                 std::span<const double> theta_grid);

// per-day variant behind RolloutConfig::per_stage_theta: one forward sweep,
// day t's theta maximizing total payoff with days before t on their fitted
// values and days from t onward sharing the candidate
std::vector<double> fit_theta_schedule(const State& start_state, const Horizon& horizon,
                                       const DrProgram& program,
                                       const UtilityParams& params, const DrChain& chain,
                                       const ZSet& z_set, const RolloutConfig& config,
                                       std::span<const double> theta_grid);

// argmax of immediate payoff plus estimated payoff-to-go under the heuristic,
// over the grid actions plus the heuristic's own action (the improvement
// guarantee needs the base policy among the candidates); smallest on ties
// (1e-12)
double rollout_action(const State& state, int t, const Horizon& horizon,
                      const LinearHeuristic& h, const DrProgram& program,
                      const UtilityParams& params, const DrChain& chain,
                      const ZSet& z_set, const ActionGrid& grid,
                      const RolloutConfig& config);

struct SimResult {
  double mean = 0.0;
  double sem = 0.0;  // standard error of the mean
  int n = 0;
};

// total payoff of `policy` along each scenario path from the given start
// window; mean and standard error across paths
SimResult simulate_policy(const DayPolicy& policy, const ConsumptionWindow& start_window,
                          std::span<const ScenarioPath> paths, const DrProgram& program,
                          const UtilityParams& params);

struct ImprovementReport {
  double heuristic_mean = 0.0;
  double rollout_mean = 0.0;
  double mean_diff = 0.0;  // rollout minus heuristic
  double sem = 0.0;        // of the paired differences
  int n = 0;

  bool ok() const { return mean_diff >= -2.0 * sem; }
};

// paired comparison of total payoff, heuristic vs rollout, across n_start
// freshly drawn scenario paths from the start state
ImprovementReport verify_improvement(const State& start_state, const Horizon& horizon,
                                     const LinearHeuristic& h, const DrProgram& program,
                                     const UtilityParams& params, const DrChain& chain,
                                     const ZSet& z_set, const ActionGrid& grid,
                                     const RolloutConfig& config, int n_start);

}  // namespace drsim

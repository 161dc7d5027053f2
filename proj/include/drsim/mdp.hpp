#pragma once

#include <span>
#include <vector>

#include "drsim/baseline.hpp"
#include "drsim/utility.hpp"

// MDP substrate shared by the exact solver and the rollout policy. A day is
// described by the state s_t = (window, dr_flag, z): the last Y non-event-day
// consumptions, whether today is a DR event, and the day's utility scale.

namespace drsim {

struct State {
  ConsumptionWindow window;
  int dr_flag = 0;
  double z = 1.0;
};

// Two-state event chain: p0 = P(event tomorrow | no event today),
// p1 = P(event tomorrow | event today).
struct DrChain {
  double p0 = 0.2;
  double p1 = 0.4;

  // long-run fraction of event days
  double stationary_dr_fraction() const { return p0 / (p0 + 1.0 - p1); }
};

struct Horizon {
  int days = 93;
};

// Finite support for the i.i.d. utility-scale draws; values sorted ascending,
// probs matching and summing to 1.
struct ZSet {
  std::vector<double> values;
  std::vector<double> probs;
};

void validate_state(const State& state);
void validate_chain(const DrChain& chain);
void validate_horizon(const Horizon& horizon);
void validate_z_set(const ZSet& z_set);

// Event days freeze the window; other days shift the action in at the front
// and drop the oldest entry.
ConsumptionWindow transition_window(const State& state, double action, double a_hat);

// dr_flag * r * max(B(window) - action, 0)
double rebate(std::span<const double> window, int dr_flag, double action,
              const DrProgram& program);

// net utility of the action plus any rebate earned today
double immediate_payoff(const State& state, double action, const DrProgram& program,
                        const UtilityParams& params);

double dr_transition_prob(int y_now, int y_next, const DrChain& chain);

}  // namespace drsim

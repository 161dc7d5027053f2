#include "drsim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drsim {

void validate_state(const State& state) {
  if (state.dr_flag != 0 && state.dr_flag != 1) {
    throw std::invalid_argument("dr_flag must be 0 or 1");
  }
  if (!(state.z > 0.0) || !std::isfinite(state.z)) {
    throw std::invalid_argument("state z must be finite and > 0");
  }
  if (state.window.empty()) throw std::invalid_argument("state window must not be empty");
  for (double v : state.window) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("state window values must be finite and nonnegative");
    }
  }
}

void validate_chain(const DrChain& chain) {
  if (!(chain.p0 >= 0.0 && chain.p0 <= 1.0 && chain.p1 >= 0.0 && chain.p1 <= 1.0)) {
    throw std::invalid_argument("chain probabilities must lie in [0, 1]");
  }
}

void validate_horizon(const Horizon& horizon) {
  if (horizon.days < 1) throw std::invalid_argument("horizon must cover at least one day");
}

void validate_z_set(const ZSet& z_set) {
  if (z_set.values.empty() || z_set.values.size() != z_set.probs.size()) {
    throw std::invalid_argument("z set needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < z_set.values.size(); ++i) {
    if (!(z_set.values[i] > 0.0)) throw std::invalid_argument("z values must be > 0");
    if (i > 0 && !(z_set.values[i] > z_set.values[i - 1])) {
      throw std::invalid_argument("z values must be strictly increasing");
    }
    if (!(z_set.probs[i] >= 0.0)) throw std::invalid_argument("z probs must be >= 0");
    total += z_set.probs[i];
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("z probs must sum to 1, got " + std::to_string(total));
  }
}

ConsumptionWindow transition_window(const State& state, double action, double a_hat) {
  if (!(action >= 0.0) || action > a_hat * (1.0 + 1e-12)) {
    throw std::domain_error("action must lie in [0, a_hat]");
  }
  if (state.dr_flag == 1) return state.window;
  ConsumptionWindow next(state.window.size());
  next[0] = action;
  std::copy(state.window.begin(), state.window.end() - 1, next.begin() + 1);
  return next;
}

double rebate(std::span<const double> window, int dr_flag, double action,
              const DrProgram& program) {
  if (dr_flag == 0) return 0.0;
  double shortfall = compute_baseline(window, program) - action;
  return shortfall > 0.0 ? program.rebate_price * shortfall : 0.0;
}

double immediate_payoff(const State& state, double action, const DrProgram& program,
                        const UtilityParams& params) {
  return net_utility(action, state.z, params) +
         rebate(state.window, state.dr_flag, action, program);
}

double dr_transition_prob(int y_now, int y_next, const DrChain& chain) {
  if ((y_now != 0 && y_now != 1) || (y_next != 0 && y_next != 1)) {
    throw std::invalid_argument("chain states must be 0 or 1");
  }
  double p_event = y_now == 1 ? chain.p1 : chain.p0;
  return y_next == 1 ? p_event : 1.0 - p_event;
}

}  // namespace drsim

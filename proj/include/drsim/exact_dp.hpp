#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drsim/mdp.hpp"

// Exact finite-horizon solver. Backward induction over the full discretized
// state space: windows on the action-grid lattice (the closure of the states
// reachable once the initial window is snapped to the grid), event flag in
// {0,1}, and the finite z set. Pure tabular: off-lattice queries are errors,
// never interpolated.

namespace drsim {

struct ActionGrid {
  std::vector<double> points;  // strictly increasing, spanning [0, a_hat]

  // n evenly spaced points from 0 to a_hat inclusive; n >= 2
  static ActionGrid uniform(int n, double a_hat);

  // exact-match lookup with a 1e-9 absolute tolerance; -1 when absent
  int index_of(double a) const;
  double snap(double a) const;
  // largest adjacent spacing, the slack used by "within one grid step" checks
  double max_step() const;
};

void validate_grid(const ActionGrid& grid);
ConsumptionWindow snap_window(const ConsumptionWindow& window, const ActionGrid& grid);

struct DpConfig {
  bool keep_values = false;  // retain V_t for every stage (verification runs)
  std::uint64_t max_table_bytes = 1ull << 30;
  int threads = 1;
};

class DpTables {
 public:
  DpTables(Horizon horizon, DrProgram program, UtilityParams params, DrChain chain,
           ActionGrid grid, ZSet z_set, ConsumptionWindow initial_window,
           bool keep_values);

  int horizon() const { return horizon_.days; }
  int window_len() const { return static_cast<int>(initial_window_.size()); }
  const ActionGrid& grid() const { return grid_; }
  const ZSet& z_set() const { return z_set_; }
  const DrProgram& program() const { return program_; }
  const UtilityParams& params() const { return params_; }
  const DrChain& chain() const { return chain_; }
  const ConsumptionWindow& initial_window() const { return initial_window_; }

  std::size_t n_windows() const { return n_windows_; }
  std::size_t n_states() const { return n_states_; }
  bool has_values() const { return !values_.empty(); }

  // throws std::out_of_range for states off the lattice
  std::size_t state_index(const State& state) const;
  std::size_t state_index(std::size_t w_idx, int dr_flag, std::size_t z_idx) const {
    return (w_idx * 2 + static_cast<std::size_t>(dr_flag)) * z_set_.values.size() + z_idx;
  }
  State state_at(std::size_t index) const;
  ConsumptionWindow window_at(std::size_t w_idx) const;

  double action_at(int t, std::size_t state_idx) const;
  double value_at(int t, std::size_t state_idx) const;

 private:
  friend DpTables solve_dp(const Horizon&, const DrProgram&, const UtilityParams&,
                           const DrChain&, const ActionGrid&, const ZSet&,
                           const ConsumptionWindow&, const DpConfig&);

  Horizon horizon_;
  DrProgram program_;
  UtilityParams params_;
  DrChain chain_;
  ActionGrid grid_;
  ZSet z_set_;
  ConsumptionWindow initial_window_;
  std::size_t n_windows_ = 0;
  std::size_t n_states_ = 0;
  std::vector<std::vector<std::uint8_t>> policy_;  // [t][state] action index
  std::vector<std::vector<double>> values_;        // [t][state], only if kept
};

DpTables solve_dp(const Horizon& horizon, const DrProgram& program,
                  const UtilityParams& params, const DrChain& chain,
                  const ActionGrid& grid, const ZSet& z_set,
                  const ConsumptionWindow& initial_window, const DpConfig& config = {});

double policy_at(const DpTables& tables, int t, const State& state);
double value_at(const DpTables& tables, int t, const State& state);

// grid argmax of net utility at scale z, with the solver's tie rule; the
// action a rational customer takes when no program is in force
double intrinsic_grid_action(double z, const ActionGrid& grid,
                             const UtilityParams& params);

struct TheoremReport {
  std::string name;
  long checked = 0;
  long violations = 0;
  std::vector<std::string> examples;  // first few violating states

  bool ok() const { return violations == 0; }
};

// Event-day actions at or below the intrinsic baseline, non-event actions at
// or above it, each within one grid step. n_samples = 0 scans every (t, state).
TheoremReport verify_theorem1(const DpTables& tables, long n_samples, std::uint64_t seed);

// Value monotonicity in the window: x <= x' componentwise implies
// V_t(x, y, z) <= V_t(x', y, z). Needs keep_values.
TheoremReport verify_lemma1(const DpTables& tables, long n_pairs, std::uint64_t seed);

// Non-event action monotonicity in the window, within one grid step. Only for
// programs whose baseline is supermodular: LowXofY, or X = Y (the plain mean).
TheoremReport verify_theorem3(const DpTables& tables, long n_pairs, std::uint64_t seed);

// stage, window, dr_flag, z, action[, value] rows for inspection
void dump_tables_csv(const DpTables& tables, std::ostream& out, int stage);

}  // namespace drsim

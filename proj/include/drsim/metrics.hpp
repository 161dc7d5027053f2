#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drsim/mdp.hpp"
#include "drsim/rollout.hpp"
#include "drsim/scenario.hpp"

// Bias and manipulation reporting. Bias compares the announced baseline on
// event days against what the customer would have consumed with no program in
// place; manipulation is the bias gap between the strategic and the intrinsic
// simulation of the same paths, so the comparison is paired by construction.

namespace drsim {

struct BiasReport {
  double bias_percent = 0.0;
  int n_dr_days = 0;
  // per-day inputs kept for audits
  std::vector<double> baselines;
  std::vector<double> intrinsic;
};

// 100 * sum(B_t - a_t) / sum(a_t) over event days
BiasReport bias(std::span<const double> baselines_on_dr_days,
                std::span<const double> intrinsic_on_dr_days);

// realized consumption of a policy along one path, with the window at the
// start of every day kept for baseline recomputation
struct PathSim {
  std::vector<double> actions;
  std::vector<ConsumptionWindow> windows;
};

PathSim simulate_consumption(const DayPolicy& policy, int path_index,
                             const ConsumptionWindow& start_window,
                             const ScenarioPath& path, const UtilityParams& params);

struct CurvePoint {
  int x = 0;
  double bias_no_dr_pct = 0.0;
  double bias_dr_pct = 0.0;
  double manipulation_pct = 0.0;
  double sem_pct = 0.0;  // standard error of the paired per-path manipulation
  std::vector<double> per_path_bias_no_dr;
  std::vector<double> per_path_bias_dr;
  std::vector<double> per_path_manipulation;
};

struct ManipulationCurve {
  std::vector<CurvePoint> points;
};

// For each X: simulate the strategic policy for that program over all paths,
// recompute baselines from realized windows, and compare against the shared
// intrinsic simulation. Paths without event days are skipped in both arms.
ManipulationCurve manipulation_curve(
    std::span<const int> x_values, const std::function<DrProgram(int)>& program_for_x,
    const std::function<DayPolicy(const DrProgram&)>& strategic_policy_for,
    const DayPolicy& intrinsic_policy, std::span<const ScenarioPath> paths,
    const ConsumptionWindow& start_window, const UtilityParams& params);

struct SinglePeakResult {
  bool is_single_peaked = false;
  int peak_index = 0;  // position in the curve, first maximum
};

// true iff the curve rises to its first maximum and falls afterwards, with a
// plateau tolerance of 1e-6 of the curve's range
SinglePeakResult single_peak_check(std::span<const double> curve);

// header: X,bias_no_dr_pct,bias_dr_pct,manipulation_pct,stderr_pct
void write_curve_csv(const std::string& path, const ManipulationCurve& curve);

}  // namespace drsim

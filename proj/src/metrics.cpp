#include "drsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "drsim/errors.hpp"

namespace drsim {

BiasReport bias(std::span<const double> baselines_on_dr_days,
                std::span<const double> intrinsic_on_dr_days) {
  if (baselines_on_dr_days.empty()) {
    throw DataError("bias needs at least one event day");
  }
  if (baselines_on_dr_days.size() != intrinsic_on_dr_days.size()) {
    throw DataError("baseline and intrinsic sequences must have equal length");
  }
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < baselines_on_dr_days.size(); ++i) {
    if (!std::isfinite(baselines_on_dr_days[i]) || !std::isfinite(intrinsic_on_dr_days[i])) {
      throw DataError("bias inputs must be finite");
    }
    numer += baselines_on_dr_days[i] - intrinsic_on_dr_days[i];
    denom += intrinsic_on_dr_days[i];
  }
  if (!(denom > 0.0)) {
    throw DataError("intrinsic consumption over event days must be positive");
  }
  BiasReport report;
  report.bias_percent = 100.0 * numer / denom;
  report.n_dr_days = static_cast<int>(baselines_on_dr_days.size());
  report.baselines.assign(baselines_on_dr_days.begin(), baselines_on_dr_days.end());
  report.intrinsic.assign(intrinsic_on_dr_days.begin(), intrinsic_on_dr_days.end());
  return report;
}

PathSim simulate_consumption(const DayPolicy& policy, int path_index,
                             const ConsumptionWindow& start_window,
                             const ScenarioPath& path, const UtilityParams& params) {
  if (!policy) throw std::invalid_argument("policy must be callable");
  if (start_window.empty()) throw std::invalid_argument("start window must be nonempty");
  std::size_t n_days = path.dr_flags.size();
  if (n_days == 0 || path.z_values.size() != n_days) {
    throw std::invalid_argument("path day counts must match and be positive");
  }

  PathSim sim;
  sim.actions.reserve(n_days);
  sim.windows.reserve(n_days);
  State s{start_window, path.dr_flags[0], path.z_values[0]};
  for (std::size_t t = 0; t < n_days; ++t) {
    sim.windows.push_back(s.window);
    double a = policy(path_index, static_cast<int>(t), s);
    sim.actions.push_back(a);
    if (t + 1 < n_days) {
      s.window = transition_window(s, a, params.a_hat);
      s.dr_flag = path.dr_flags[t + 1];
      s.z = path.z_values[t + 1];
    }
  }
  return sim;
}

namespace {

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

MeanSem mean_sem(std::span<const double> values) {
  MeanSem out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    out.sem = sd / std::sqrt(static_cast<double>(values.size()));
  }
  return out;
}

// event-day baselines of one simulated path under the given program
void dr_day_baselines(const PathSim& sim, const ScenarioPath& path,
                      const DrProgram& program, std::vector<double>& out) {
  out.clear();
  for (std::size_t t = 0; t < path.dr_flags.size(); ++t) {
    if (path.dr_flags[t] == 1) {
      out.push_back(compute_baseline(sim.windows[t], program));
    }
  }
}

}  // namespace

ManipulationCurve manipulation_curve(
    std::span<const int> x_values, const std::function<DrProgram(int)>& program_for_x,
    const std::function<DayPolicy(const DrProgram&)>& strategic_policy_for,
    const DayPolicy& intrinsic_policy, std::span<const ScenarioPath> paths,
    const ConsumptionWindow& start_window, const UtilityParams& params) {
  if (x_values.empty()) throw std::invalid_argument("need at least one X value");
  if (!program_for_x || !strategic_policy_for) {
    throw std::invalid_argument("program and policy factories must be callable");
  }
  if (paths.empty()) throw std::invalid_argument("need at least one path");

  std::vector<PathSim> intrinsic_sims;
  intrinsic_sims.reserve(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    intrinsic_sims.push_back(simulate_consumption(intrinsic_policy, static_cast<int>(p),
                                                  start_window, paths[p], params));
  }

  // intrinsic event-day consumption per path, the shared denominator of both
  // bias arms
  std::vector<std::vector<double>> intrinsic_dr(paths.size());
  bool any_dr = false;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t t = 0; t < paths[p].dr_flags.size(); ++t) {
      if (paths[p].dr_flags[t] == 1) {
        intrinsic_dr[p].push_back(intrinsic_sims[p].actions[t]);
      }
    }
    if (!intrinsic_dr[p].empty()) any_dr = true;
  }
  if (!any_dr) throw DataError("no path contains an event day");

  ManipulationCurve curve;
  curve.points.reserve(x_values.size());
  std::vector<double> b_no;
  std::vector<double> b_dr;
  for (int x : x_values) {
    DrProgram program = program_for_x(x);
    DayPolicy strategic = strategic_policy_for(program);

    CurvePoint point;
    point.x = x;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      if (intrinsic_dr[p].empty()) continue;
      PathSim strat_sim = simulate_consumption(strategic, static_cast<int>(p),
                                               start_window, paths[p], params);
      dr_day_baselines(intrinsic_sims[p], paths[p], program, b_no);
      dr_day_baselines(strat_sim, paths[p], program, b_dr);
      double no_dr = bias(b_no, intrinsic_dr[p]).bias_percent;
      double with_dr = bias(b_dr, intrinsic_dr[p]).bias_percent;
      point.per_path_bias_no_dr.push_back(no_dr);
      point.per_path_bias_dr.push_back(with_dr);
      point.per_path_manipulation.push_back(with_dr - no_dr);
    }

    point.bias_no_dr_pct = mean_sem(point.per_path_bias_no_dr).mean;
    point.bias_dr_pct = mean_sem(point.per_path_bias_dr).mean;
    MeanSem manip = mean_sem(point.per_path_manipulation);
    point.manipulation_pct = manip.mean;
    point.sem_pct = manip.sem;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

SinglePeakResult single_peak_check(std::span<const double> curve) {
  if (curve.empty()) throw std::invalid_argument("curve must be nonempty");
  double lo = curve[0];
  double hi = curve[0];
  for (double v : curve) {
    if (!std::isfinite(v)) throw std::invalid_argument("curve values must be finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double eps = 1e-6 * (hi - lo);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] > curve[peak]) peak = i;
  }

  SinglePeakResult result;
  result.peak_index = static_cast<int>(peak);
  for (std::size_t i = 0; i < peak; ++i) {
    if (curve[i] > curve[i + 1] + eps) return result;
  }
  for (std::size_t i = peak; i + 1 < curve.size(); ++i) {
    if (curve[i + 1] > curve[i] + eps) return result;
  }
  result.is_single_peaked = true;
  return result;
}

void write_curve_csv(const std::string& path, const ManipulationCurve& curve) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "X,bias_no_dr_pct,bias_dr_pct,manipulation_pct,stderr_pct\n";
  char line[256];
  for (const CurvePoint& point : curve.points) {
    std::snprintf(line, sizeof(line), "%d,%.12g,%.12g,%.12g,%.12g\n", point.x,
                  point.bias_no_dr_pct, point.bias_dr_pct, point.manipulation_pct,
                  point.sem_pct);
    out << line;
  }
  if (!out.good()) throw DataError("failed writing " + path);
}

}  // namespace drsim

#include "drsim/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drsim/rng.hpp"

namespace drsim {

namespace {

// exogenous draws for the days after an anchor day: dr[k] and zi[k] describe
// day anchor + 1 + k, with the event chain continued from the anchor's flag
struct ExoPath {
  std::vector<std::uint8_t> dr;
  std::vector<int> zi;
};

int draw_z_index(const ZSet& z_set, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  int last = static_cast<int>(z_set.values.size()) - 1;
  for (int i = 0; i < last; ++i) {
    acc += z_set.probs[i];
    if (u < acc) return i;
  }
  return last;
}

ExoPath draw_exo(int y_anchor, int n_days, const DrChain& chain, const ZSet& z_set,
                 Rng& rng) {
  ExoPath exo;
  exo.dr.resize(static_cast<std::size_t>(n_days));
  exo.zi.resize(static_cast<std::size_t>(n_days));
  int y = y_anchor;
  for (int k = 0; k < n_days; ++k) {
    double p = (y == 1) ? chain.p1 : chain.p0;
    y = rng.bernoulli(p) ? 1 : 0;
    exo.dr[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(y);
    exo.zi[static_cast<std::size_t>(k)] = draw_z_index(z_set, rng);
  }
  return exo;
}

// closed-form per-scale actions, computed once per solve instead of per
// simulated day
struct ZCache {
  std::vector<double> a_b;
  std::vector<double> a_u;
  std::vector<double> b_th;
};

ZCache build_z_cache(const ZSet& z_set, double r, const UtilityParams& params) {
  ZCache cache;
  cache.a_b.reserve(z_set.values.size());
  cache.a_u.reserve(z_set.values.size());
  cache.b_th.reserve(z_set.values.size());
  for (double z : z_set.values) {
    cache.a_b.push_back(intrinsic_baseline(z, params));
    cache.a_u.push_back(penalized_optimum(z, r, params));
    cache.b_th.push_back(threshold_baseline(z, r, params));
  }
  return cache;
}

struct DayScalars {
  double a_b = 0.0;
  double a_u = 0.0;
  double b_th = 0.0;
};

DayScalars day_scalars(double z, double r, const UtilityParams& params) {
  return DayScalars{intrinsic_baseline(z, params), penalized_optimum(z, r, params),
                    threshold_baseline(z, r, params)};
}

// one simulated day under the heuristic: returns the payoff and advances the
// window in place
double day_step(ConsumptionWindow& window, int y, double z, const DayScalars& d,
                double theta, const DrProgram& program, const UtilityParams& params) {
  if (y == 1) {
    double b = compute_baseline(window, program);
    double a = b < d.b_th ? d.a_b : d.a_u;
    double payoff = net_utility(a, z, params);
    double shortfall = b - a;
    if (shortfall > 0.0) payoff += program.rebate_price * shortfall;
    return payoff;
  }
  double raw = d.a_b + theta * *std::max_element(window.begin(), window.end());
  double a = std::clamp(raw, 0.0, params.a_hat);
  double payoff = net_utility(a, z, params);
  for (std::size_t j = window.size() - 1; j > 0; --j) window[j] = window[j - 1];
  window[0] = a;
  return payoff;
}

// heuristic payoff over the days in `exo`, starting from the given window
double tail_payoff(ConsumptionWindow window, const ExoPath& exo, double theta,
                   const ZCache& cache, const ZSet& z_set, const DrProgram& program,
                   const UtilityParams& params) {
  double total = 0.0;
  for (std::size_t k = 0; k < exo.dr.size(); ++k) {
    int zi = exo.zi[k];
    DayScalars d{cache.a_b[static_cast<std::size_t>(zi)],
                 cache.a_u[static_cast<std::size_t>(zi)],
                 cache.b_th[static_cast<std::size_t>(zi)]};
    total += day_step(window, exo.dr[k], z_set.values[static_cast<std::size_t>(zi)], d,
                      theta, program, params);
  }
  return total;
}

// full-horizon heuristic payoff: the start state's day plus the exo tail;
// theta_at(day) supplies the day's theta so schedules cost nothing extra
template <typename ThetaAt>
double start_path_payoff(const State& start, const DayScalars& day0, const ExoPath& exo,
                         ThetaAt theta_at, const ZCache& cache, const ZSet& z_set,
                         const DrProgram& program, const UtilityParams& params) {
  ConsumptionWindow window = start.window;
  double total =
      day_step(window, start.dr_flag, start.z, day0, theta_at(0), program, params);
  for (std::size_t k = 0; k < exo.dr.size(); ++k) {
    int zi = exo.zi[k];
    DayScalars d{cache.a_b[static_cast<std::size_t>(zi)],
                 cache.a_u[static_cast<std::size_t>(zi)],
                 cache.b_th[static_cast<std::size_t>(zi)]};
    total += day_step(window, exo.dr[k], z_set.values[static_cast<std::size_t>(zi)], d,
                      theta_at(static_cast<int>(k) + 1), program, params);
  }
  return total;
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("theta must lie in [0, 1]");
  }
}

void check_theta_grid(std::span<const double> theta_grid) {
  if (theta_grid.empty()) {
    throw std::invalid_argument("theta grid must be nonempty");
  }
  for (double th : theta_grid) check_theta(th);
}

std::vector<ExoPath> draw_fit_paths(const State& start, const Horizon& horizon,
                                    const DrChain& chain, const ZSet& z_set,
                                    const RolloutConfig& config) {
  std::vector<ExoPath> exo(static_cast<std::size_t>(config.n_fit_paths));
  for (int p = 0; p < config.n_fit_paths; ++p) {
    Rng rng(derive_seed(config.seed, stream::theta_fit, static_cast<std::uint64_t>(p)));
    exo[static_cast<std::size_t>(p)] =
        draw_exo(start.dr_flag, horizon.days - 1, chain, z_set, rng);
  }
  return exo;
}

// first index whose value is within tol of the maximum; mirrors the exact
// solver's tie handling
int argmax_first_within(std::span<const double> q, double tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : q) best = std::max(best, v);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] >= best - tol) return static_cast<int>(i);
  }
  return 0;
}

}  // namespace

double heuristic_feature(const ConsumptionWindow& window, HeuristicFeature feature) {
  if (window.empty()) throw std::invalid_argument("window must be nonempty");
  switch (feature) {
    case HeuristicFeature::WindowMax:
      return *std::max_element(window.begin(), window.end());
  }
  throw std::logic_error("unknown heuristic feature");
}

double heuristic_action(const State& state, const LinearHeuristic& h,
                        const UtilityParams& params, const DrProgram& program) {
  validate_state(state);
  check_theta(h.theta);
  if (state.dr_flag == 1) {
    double b = compute_baseline(state.window, program);
    return dr_day_policy(b, state.z, program.rebate_price, params);
  }
  double a = intrinsic_baseline(state.z, params) +
             h.theta * heuristic_feature(state.window, h.feature);
  return std::clamp(a, 0.0, params.a_hat);
}

double fit_theta(const State& start_state, const Horizon& horizon,
                 const DrProgram& program, const UtilityParams& params,
                 const DrChain& chain, const ZSet& z_set, const RolloutConfig& config,
                 std::span<const double> theta_grid) {
  validate_state(start_state);
  validate_horizon(horizon);
  validate_program(program);
  validate_chain(chain);
  validate_z_set(z_set);
  check_theta_grid(theta_grid);
  if (config.n_fit_paths <= 0) {
    throw std::invalid_argument("n_fit_paths must be positive");
  }

  ZCache cache = build_z_cache(z_set, program.rebate_price, params);
  DayScalars day0 = day_scalars(start_state.z, program.rebate_price, params);
  std::vector<ExoPath> exo = draw_fit_paths(start_state, horizon, chain, z_set, config);

  double best = -std::numeric_limits<double>::infinity();
  double best_theta = theta_grid[0];
  for (double th : theta_grid) {
    double sum = 0.0;
    for (const ExoPath& e : exo) {
      sum += start_path_payoff(
          start_state, day0, e, [th](int) { return th; }, cache, z_set, program, params);
    }
    double mean = sum / static_cast<double>(config.n_fit_paths);
    if (mean > best) {
      best = mean;
      best_theta = th;
    }
  }
  return best_theta;
}

std::vector<double> fit_theta_schedule(const State& start_state, const Horizon& horizon,
                                       const DrProgram& program,
                                       const UtilityParams& params, const DrChain& chain,
                                       const ZSet& z_set, const RolloutConfig& config,
                                       std::span<const double> theta_grid) {
  validate_state(start_state);
  validate_horizon(horizon);
  validate_program(program);
  validate_chain(chain);
  validate_z_set(z_set);
  check_theta_grid(theta_grid);
  if (config.n_fit_paths <= 0) {
    throw std::invalid_argument("n_fit_paths must be positive");
  }

  ZCache cache = build_z_cache(z_set, program.rebate_price, params);
  DayScalars day0 = day_scalars(start_state.z, program.rebate_price, params);
  std::vector<ExoPath> exo = draw_fit_paths(start_state, horizon, chain, z_set, config);

  std::vector<double> schedule(static_cast<std::size_t>(horizon.days), theta_grid[0]);
  for (int t = 0; t < horizon.days; ++t) {
    double best = -std::numeric_limits<double>::infinity();
    double best_theta = theta_grid[0];
    for (double th : theta_grid) {
      auto theta_at = [&schedule, t, th](int day) {
        return day < t ? schedule[static_cast<std::size_t>(day)] : th;
      };
      double sum = 0.0;
      for (const ExoPath& e : exo) {
        sum += start_path_payoff(start_state, day0, e, theta_at, cache, z_set, program,
                                 params);
      }
      double mean = sum / static_cast<double>(config.n_fit_paths);
      if (mean > best) {
        best = mean;
        best_theta = th;
      }
    }
    schedule[static_cast<std::size_t>(t)] = best_theta;
  }
  return schedule;
}

double rollout_action(const State& state, int t, const Horizon& horizon,
                      const LinearHeuristic& h, const DrProgram& program,
                      const UtilityParams& params, const DrChain& chain,
                      const ZSet& z_set, const ActionGrid& grid,
                      const RolloutConfig& config) {
  validate_state(state);
  validate_horizon(horizon);
  validate_program(program);
  validate_chain(chain);
  validate_z_set(z_set);
  validate_grid(grid);
  check_theta(h.theta);
  if (t < 0 || t >= horizon.days) {
    throw std::invalid_argument("day index outside the horizon");
  }
  if (config.n_eval_paths <= 0) {
    throw std::invalid_argument("n_eval_paths must be positive");
  }
  if (grid.points.back() > params.a_hat * (1.0 + 1e-9)) {
    throw std::invalid_argument("action grid exceeds the consumption cap");
  }

  // The improvement guarantee needs the heuristic's own action among the
  // candidates, so the grid is augmented with it (kept sorted, deduplicated).
  std::vector<double> acts = grid.points;
  double base_action = heuristic_action(state, h, params, program);
  auto slot = std::lower_bound(acts.begin(), acts.end(), base_action);
  bool dup = (slot != acts.end() && *slot - base_action <= 1e-12) ||
             (slot != acts.begin() && base_action - *(slot - 1) <= 1e-12);
  if (!dup) acts.insert(slot, base_action);
  std::vector<double> q(acts.size());

  int tail_days = horizon.days - 1 - t;

  // Event days freeze the window and the last day has no future, so in both
  // cases the continuation is the same for every candidate under shared
  // draws; the immediate payoff decides alone.
  if (state.dr_flag == 1 || tail_days == 0) {
    for (std::size_t i = 0; i < acts.size(); ++i) {
      q[i] = immediate_payoff(state, acts[i], program, params);
    }
    return acts[static_cast<std::size_t>(argmax_first_within(q, 1e-12))];
  }

  ZCache cache = build_z_cache(z_set, program.rebate_price, params);
  std::vector<ExoPath> exo(static_cast<std::size_t>(config.n_eval_paths));
  for (int p = 0; p < config.n_eval_paths; ++p) {
    Rng rng(derive_seed(config.seed, stream::rollout_eval, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(p)));
    exo[static_cast<std::size_t>(p)] =
        draw_exo(state.dr_flag, tail_days, chain, z_set, rng);
  }

  for (std::size_t i = 0; i < acts.size(); ++i) {
    double g0 = immediate_payoff(state, acts[i], program, params);
    ConsumptionWindow next = transition_window(state, acts[i], params.a_hat);
    double sum = 0.0;
    for (const ExoPath& e : exo) {
      sum += tail_payoff(next, e, h.theta, cache, z_set, program, params);
    }
    q[i] = g0 + sum / static_cast<double>(config.n_eval_paths);
  }
  return acts[static_cast<std::size_t>(argmax_first_within(q, 1e-12))];
}

SimResult simulate_policy(const DayPolicy& policy, const ConsumptionWindow& start_window,
                          std::span<const ScenarioPath> paths, const DrProgram& program,
                          const UtilityParams& params) {
  if (!policy) throw std::invalid_argument("policy must be callable");
  if (paths.empty()) throw std::invalid_argument("need at least one path");
  if (start_window.empty()) throw std::invalid_argument("start window must be nonempty");
  validate_program(program);

  std::vector<double> totals;
  totals.reserve(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const ScenarioPath& path = paths[p];
    std::size_t n_days = path.dr_flags.size();
    if (n_days == 0 || path.z_values.size() != n_days) {
      throw std::invalid_argument("path day counts must match and be positive");
    }
    State s{start_window, path.dr_flags[0], path.z_values[0]};
    double total = 0.0;
    for (std::size_t t = 0; t < n_days; ++t) {
      double a = policy(static_cast<int>(p), static_cast<int>(t), s);
      total += immediate_payoff(s, a, program, params);
      if (t + 1 < n_days) {
        s.window = transition_window(s, a, params.a_hat);
        s.dr_flag = path.dr_flags[t + 1];
        s.z = path.z_values[t + 1];
      }
    }
    totals.push_back(total);
  }

  SimResult result;
  result.n = static_cast<int>(totals.size());
  double sum = 0.0;
  for (double v : totals) sum += v;
  result.mean = sum / static_cast<double>(totals.size());
  if (totals.size() > 1) {
    double ss = 0.0;
    for (double v : totals) ss += (v - result.mean) * (v - result.mean);
    double sd = std::sqrt(ss / static_cast<double>(totals.size() - 1));
    result.sem = sd / std::sqrt(static_cast<double>(totals.size()));
  }
  return result;
}

ImprovementReport verify_improvement(const State& start_state, const Horizon& horizon,
                                     const LinearHeuristic& h, const DrProgram& program,
                                     const UtilityParams& params, const DrChain& chain,
                                     const ZSet& z_set, const ActionGrid& grid,
                                     const RolloutConfig& config, int n_start) {
  validate_state(start_state);
  validate_horizon(horizon);
  validate_program(program);
  validate_chain(chain);
  validate_z_set(z_set);
  validate_grid(grid);
  check_theta(h.theta);
  if (n_start <= 0) throw std::invalid_argument("n_start must be positive");

  ZCache cache = build_z_cache(z_set, program.rebate_price, params);
  DayScalars day0 = day_scalars(start_state.z, program.rebate_price, params);

  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(n_start));
  double h_sum = 0.0;
  double r_sum = 0.0;
  for (int i = 0; i < n_start; ++i) {
    Rng rng(derive_seed(config.seed, stream::improvement, static_cast<std::uint64_t>(i)));
    ExoPath exo = draw_exo(start_state.dr_flag, horizon.days - 1, chain, z_set, rng);

    double h_total = start_path_payoff(
        start_state, day0, exo, [&h](int) { return h.theta; }, cache, z_set, program,
        params);

    RolloutConfig inner = config;
    inner.seed = derive_seed(config.seed, stream::improvement,
                             static_cast<std::uint64_t>(i), 1);
    State s = start_state;
    double r_total = 0.0;
    for (int t = 0; t < horizon.days; ++t) {
      double a =
          rollout_action(s, t, horizon, h, program, params, chain, z_set, grid, inner);
      r_total += immediate_payoff(s, a, program, params);
      if (t + 1 < horizon.days) {
        std::size_t k = static_cast<std::size_t>(t);
        s.window = transition_window(s, a, params.a_hat);
        s.dr_flag = exo.dr[k];
        s.z = z_set.values[static_cast<std::size_t>(exo.zi[k])];
      }
    }

    h_sum += h_total;
    r_sum += r_total;
    diffs.push_back(r_total - h_total);
  }

  ImprovementReport report;
  report.n = n_start;
  report.heuristic_mean = h_sum / static_cast<double>(n_start);
  report.rollout_mean = r_sum / static_cast<double>(n_start);
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n_start);
  report.mean_diff = mean;
  if (n_start > 1) {
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    double sd = std::sqrt(ss / static_cast<double>(n_start - 1));
    report.sem = sd / std::sqrt(static_cast<double>(n_start));
  }
  return report;
}

}  // namespace drsim

#include "drsim/exact_dp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "drsim/errors.hpp"
#include "drsim/parallel.hpp"
#include "drsim/rng.hpp"

namespace drsim {

namespace {

constexpr double kLookupTol = 1e-9;   // exact-match slack for lattice lookups
constexpr double kTieTol = 1e-12;     // argmax tie window, smallest action wins
constexpr double kOrderTol = 1e-9;    // slack on ordering checks

std::string describe_window(const ConsumptionWindow& window) {
  std::string out = "(";
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(window[i]);
  }
  return out + ")";
}

}  // namespace

ActionGrid ActionGrid::uniform(int n, double a_hat) {
  if (n < 2) throw std::invalid_argument("action grid needs at least 2 points");
  if (!(a_hat > 0.0)) throw std::invalid_argument("action grid needs a_hat > 0");
  ActionGrid grid;
  grid.points.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid.points[static_cast<std::size_t>(i)] =
        a_hat * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.points.front() = 0.0;
  grid.points.back() = a_hat;
  return grid;
}

int ActionGrid::index_of(double a) const {
  auto it = std::lower_bound(points.begin(), points.end(), a);
  if (it != points.end() && std::fabs(*it - a) <= kLookupTol) {
    return static_cast<int>(it - points.begin());
  }
  if (it != points.begin() && std::fabs(*(it - 1) - a) <= kLookupTol) {
    return static_cast<int>(it - points.begin()) - 1;
  }
  return -1;
}

double ActionGrid::snap(double a) const {
  auto it = std::lower_bound(points.begin(), points.end(), a);
  if (it == points.end()) return points.back();
  if (it == points.begin()) return points.front();
  double above = *it;
  double below = *(it - 1);
  return (a - below) <= (above - a) ? below : above;
}

double ActionGrid::max_step() const {
  double step = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    step = std::max(step, points[i] - points[i - 1]);
  }
  return step;
}

void validate_grid(const ActionGrid& grid) {
  if (grid.points.size() < 2) throw std::invalid_argument("action grid needs >= 2 points");
  if (grid.points.front() != 0.0) throw std::invalid_argument("action grid must start at 0");
  for (std::size_t i = 1; i < grid.points.size(); ++i) {
    if (!(grid.points[i] > grid.points[i - 1])) {
      throw std::invalid_argument("action grid must be strictly increasing");
    }
  }
}

ConsumptionWindow snap_window(const ConsumptionWindow& window, const ActionGrid& grid) {
  ConsumptionWindow snapped(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) snapped[i] = grid.snap(window[i]);
  return snapped;
}

DpTables::DpTables(Horizon horizon, DrProgram program, UtilityParams params,
                   DrChain chain, ActionGrid grid, ZSet z_set,
                   ConsumptionWindow initial_window, bool keep_values)
    : horizon_(horizon),
      program_(std::move(program)),
      params_(params),
      chain_(chain),
      grid_(std::move(grid)),
      z_set_(std::move(z_set)),
      initial_window_(std::move(initial_window)) {
  std::size_t g = grid_.points.size();
  n_windows_ = 1;
  for (std::size_t i = 0; i < initial_window_.size(); ++i) n_windows_ *= g;
  n_states_ = n_windows_ * 2 * z_set_.values.size();
  policy_.resize(static_cast<std::size_t>(horizon_.days));
  if (keep_values) values_.resize(static_cast<std::size_t>(horizon_.days));
}

std::size_t DpTables::state_index(const State& state) const {
  validate_state(state);
  if (state.window.size() != initial_window_.size()) {
    throw std::out_of_range("state window length does not match the solved problem");
  }
  std::size_t g = grid_.points.size();
  std::size_t w_idx = 0;
  std::size_t scale = 1;
  for (std::size_t i = 0; i < state.window.size(); ++i) {
    int digit = grid_.index_of(state.window[i]);
    if (digit < 0) {
      throw std::out_of_range("window value " + std::to_string(state.window[i]) +
                              " is not on the action grid");
    }
    w_idx += static_cast<std::size_t>(digit) * scale;
    scale *= g;
  }
  std::size_t z_idx = z_set_.values.size();
  for (std::size_t i = 0; i < z_set_.values.size(); ++i) {
    if (std::fabs(z_set_.values[i] - state.z) <= kLookupTol) {
      z_idx = i;
      break;
    }
  }
  if (z_idx == z_set_.values.size()) {
    throw std::out_of_range("z value " + std::to_string(state.z) + " is not in the z set");
  }
  return state_index(w_idx, state.dr_flag, z_idx);
}

ConsumptionWindow DpTables::window_at(std::size_t w_idx) const {
  std::size_t g = grid_.points.size();
  ConsumptionWindow window(initial_window_.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    window[i] = grid_.points[w_idx % g];
    w_idx /= g;
  }
  return window;
}

State DpTables::state_at(std::size_t index) const {
  std::size_t kz = z_set_.values.size();
  std::size_t z_idx = index % kz;
  index /= kz;
  int dr_flag = static_cast<int>(index % 2);
  index /= 2;
  return State{window_at(index), dr_flag, z_set_.values[z_idx]};
}

double DpTables::action_at(int t, std::size_t state_idx) const {
  if (t < 0 || t >= horizon_.days) throw std::invalid_argument("stage out of range");
  return grid_.points[policy_[static_cast<std::size_t>(t)].at(state_idx)];
}

double DpTables::value_at(int t, std::size_t state_idx) const {
  if (t == horizon_.days) return 0.0;  // terminal payoff
  if (t < 0 || t > horizon_.days) throw std::invalid_argument("stage out of range");
  if (values_.empty()) {
    throw std::logic_error("values were not retained; solve with keep_values");
  }
  return values_[static_cast<std::size_t>(t)].at(state_idx);
}

double policy_at(const DpTables& tables, int t, const State& state) {
  return tables.action_at(t, tables.state_index(state));
}

double value_at(const DpTables& tables, int t, const State& state) {
  return tables.value_at(t, tables.state_index(state));
}

double intrinsic_grid_action(double z, const ActionGrid& grid,
                             const UtilityParams& params) {
  validate_grid(grid);
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::invalid_argument("z must be positive and finite");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double a : grid.points) best = std::max(best, net_utility(a, z, params));
  for (double a : grid.points) {
    if (net_utility(a, z, params) >= best - 1e-12) return a;
  }
  return grid.points.front();
}

DpTables solve_dp(const Horizon& horizon, const DrProgram& program,
                  const UtilityParams& params, const DrChain& chain,
                  const ActionGrid& grid, const ZSet& z_set,
                  const ConsumptionWindow& initial_window, const DpConfig& config) {
  validate_horizon(horizon);
  validate_program(program);
  validate_chain(chain);
  validate_grid(grid);
  validate_z_set(z_set);
  if (initial_window.empty()) throw std::invalid_argument("initial window must not be empty");
  if (static_cast<int>(initial_window.size()) != program.y) {
    throw std::invalid_argument("initial window length must equal the program's Y");
  }
  if (std::fabs(grid.points.back() - params.a_hat) > kLookupTol) {
    throw std::invalid_argument("action grid must span [0, a_hat]");
  }
  std::size_t g = grid.points.size();
  if (g > 255) throw std::invalid_argument("action grid is limited to 255 points");

  // capacity check before anything is allocated
  std::size_t kz = z_set.values.size();
  double projected_windows = std::pow(static_cast<double>(g),
                                      static_cast<double>(initial_window.size()));
  double projected_states = projected_windows * 2.0 * static_cast<double>(kz);
  double stage_count = static_cast<double>(horizon.days);
  double projected_bytes = projected_states * 2.0 * sizeof(double)   // V_t, V_{t+1}
                           + projected_states * stage_count          // policy bytes
                           + projected_windows * 3.0 * sizeof(double);  // baselines, U0, U1
  if (config.keep_values) {
    projected_bytes += projected_states * stage_count * sizeof(double);
  }
  if (!(projected_bytes < static_cast<double>(config.max_table_bytes))) {
    throw ResourceError(
        "exact DP table would need about " +
        std::to_string(static_cast<std::uint64_t>(projected_bytes / (1 << 20))) +
        " MiB, over the configured budget; use the rollout solver for this Y");
  }

  DpTables tables(horizon, program, params, chain, grid, z_set,
                  snap_window(initial_window, grid), config.keep_values);
  std::size_t n_windows = tables.n_windows();
  std::size_t n_states = tables.n_states();
  std::size_t shift_mod = n_windows / g;  // g^(Y-1)

  // stage-independent tables
  std::vector<double> pi_tab(kz * g);
  for (std::size_t zi = 0; zi < kz; ++zi) {
    for (std::size_t ai = 0; ai < g; ++ai) {
      pi_tab[zi * g + ai] = net_utility(grid.points[ai], z_set.values[zi], params);
    }
  }
  std::vector<double> baselines(n_windows);
  parallel_for(n_windows, config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      baselines[w] = compute_baseline(tables.window_at(w), program);
    }
  });

  double r = program.rebate_price;
  std::vector<double> v_next(n_states, 0.0);
  std::vector<double> v_cur(n_states, 0.0);
  std::vector<double> u0(n_windows, 0.0);
  std::vector<double> u1(n_windows, 0.0);
  std::vector<double> zp = z_set.probs;

  for (int t = horizon.days - 1; t >= 0; --t) {
    auto& actions = tables.policy_[static_cast<std::size_t>(t)];
    actions.assign(n_states, 0);

    parallel_for(n_windows, config.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t w = begin; w < end; ++w) {
        double acc0 = 0.0;
        double acc1 = 0.0;
        std::size_t base = w * 2 * kz;
        for (std::size_t zi = 0; zi < kz; ++zi) {
          acc0 += zp[zi] * v_next[base + zi];
          acc1 += zp[zi] * v_next[base + kz + zi];
        }
        u0[w] = acc0;
        u1[w] = acc1;
      }
    });

    parallel_for(n_windows, config.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> q(g);
      for (std::size_t w = begin; w < end; ++w) {
        std::size_t shifted = (w % shift_mod) * g;
        for (int y = 0; y < 2; ++y) {
          double p_event = y == 1 ? chain.p1 : chain.p0;
          double ev_frozen = (1.0 - p_event) * u0[w] + p_event * u1[w];
          for (std::size_t zi = 0; zi < kz; ++zi) {
            const double* pi_z = &pi_tab[zi * g];
            if (y == 1) {
              double b = baselines[w];
              for (std::size_t ai = 0; ai < g; ++ai) {
                double short_fall = b - grid.points[ai];
                q[ai] = pi_z[ai] + (short_fall > 0.0 ? r * short_fall : 0.0) + ev_frozen;
              }
            } else {
              for (std::size_t ai = 0; ai < g; ++ai) {
                std::size_t w_next = shifted + ai;
                q[ai] = pi_z[ai] + (1.0 - p_event) * u0[w_next] + p_event * u1[w_next];
              }
            }
            double best = q[0];
            for (std::size_t ai = 1; ai < g; ++ai) best = std::max(best, q[ai]);
            std::size_t pick = 0;
            while (q[pick] < best - kTieTol) ++pick;
            std::size_t idx = (w * 2 + static_cast<std::size_t>(y)) * kz + zi;
            actions[idx] = static_cast<std::uint8_t>(pick);
            v_cur[idx] = q[pick];
          }
        }
      }
    });

    if (config.keep_values) tables.values_[static_cast<std::size_t>(t)] = v_cur;
    std::swap(v_next, v_cur);
  }
  return tables;
}

TheoremReport verify_theorem1(const DpTables& tables, long n_samples, std::uint64_t seed) {
  TheoremReport report;
  report.name = "theorem1_consumption_ordering";
  double slack = tables.grid().max_step() + kOrderTol;
  std::size_t kz = tables.z_set().values.size();

  auto check = [&](int t, std::size_t w, std::size_t zi) {
    double a_b = intrinsic_baseline(tables.z_set().values[zi], tables.params());
    double a_dr = tables.action_at(t, tables.state_index(w, 1, zi));
    double a_non = tables.action_at(t, tables.state_index(w, 0, zi));
    ++report.checked;
    bool bad = a_dr > a_b + slack || a_non < a_b - slack;
    if (bad) {
      ++report.violations;
      if (report.examples.size() < 5) {
        report.examples.push_back(
            "t=" + std::to_string(t) + " window=" + describe_window(tables.window_at(w)) +
            " z=" + std::to_string(tables.z_set().values[zi]) +
            " a_dr=" + std::to_string(a_dr) + " a_non=" + std::to_string(a_non) +
            " a_B=" + std::to_string(a_b));
      }
    }
  };

  if (n_samples <= 0) {
    for (int t = 0; t < tables.horizon(); ++t) {
      for (std::size_t w = 0; w < tables.n_windows(); ++w) {
        for (std::size_t zi = 0; zi < kz; ++zi) check(t, w, zi);
      }
    }
  } else {
    Rng rng(derive_seed(seed, stream::property_check, 1));
    for (long i = 0; i < n_samples; ++i) {
      int t = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(tables.horizon()));
      std::size_t w = rng.raw() % tables.n_windows();
      std::size_t zi = rng.raw() % kz;
      check(t, w, zi);
    }
  }
  return report;
}

namespace {

// raise each digit of w toward the top of the grid to get w' >= w componentwise
std::size_t raise_window(std::size_t w, std::size_t g, std::size_t y_len, Rng& rng) {
  std::size_t out = 0;
  std::size_t scale = 1;
  for (std::size_t i = 0; i < y_len; ++i) {
    std::size_t digit = w % g;
    w /= g;
    std::size_t room = g - 1 - digit;
    std::size_t raised = digit + (room > 0 ? rng.raw() % (room + 1) : 0);
    out += raised * scale;
    scale *= g;
  }
  return out;
}

}  // namespace

TheoremReport verify_lemma1(const DpTables& tables, long n_pairs, std::uint64_t seed) {
  if (!tables.has_values()) {
    throw std::logic_error("lemma 1 scan needs value tables; solve with keep_values");
  }
  TheoremReport report;
  report.name = "lemma1_value_monotonicity";
  std::size_t g = tables.grid().points.size();
  std::size_t kz = tables.z_set().values.size();
  std::size_t y_len = static_cast<std::size_t>(tables.window_len());
  Rng rng(derive_seed(seed, stream::property_check, 2));
  for (long i = 0; i < n_pairs; ++i) {
    int t = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(tables.horizon()));
    std::size_t w = rng.raw() % tables.n_windows();
    std::size_t w_hi = raise_window(w, g, y_len, rng);
    int y = static_cast<int>(rng.raw() % 2);
    std::size_t zi = rng.raw() % kz;
    double v_lo = tables.value_at(t, tables.state_index(w, y, zi));
    double v_hi = tables.value_at(t, tables.state_index(w_hi, y, zi));
    ++report.checked;
    if (v_lo > v_hi + kOrderTol) {
      ++report.violations;
      if (report.examples.size() < 5) {
        report.examples.push_back("t=" + std::to_string(t) +
                                  " window=" + describe_window(tables.window_at(w)) +
                                  " raised=" + describe_window(tables.window_at(w_hi)) +
                                  " V=" + std::to_string(v_lo) + " vs " +
                                  std::to_string(v_hi));
      }
    }
  }
  return report;
}

TheoremReport verify_theorem3(const DpTables& tables, long n_pairs, std::uint64_t seed) {
  const DrProgram& program = tables.program();
  bool mean_baseline = program.x == program.y &&
                       (program.method == BaselineMethod::HighXofY ||
                        program.method == BaselineMethod::LowXofY ||
                        program.method == BaselineMethod::MidXofY);
  if (!mean_baseline && program.method != BaselineMethod::LowXofY) {
    throw std::invalid_argument(
        "theorem 3 applies to LowXofY or X=Y programs; hypothesis fails otherwise");
  }
  TheoremReport report;
  report.name = "theorem3_policy_monotonicity";
  double slack = tables.grid().max_step() + kOrderTol;
  std::size_t g = tables.grid().points.size();
  std::size_t kz = tables.z_set().values.size();
  std::size_t y_len = static_cast<std::size_t>(tables.window_len());
  Rng rng(derive_seed(seed, stream::property_check, 3));
  for (long i = 0; i < n_pairs; ++i) {
    int t = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(tables.horizon()));
    std::size_t w = rng.raw() % tables.n_windows();
    std::size_t w_hi = raise_window(w, g, y_len, rng);
    std::size_t zi = rng.raw() % kz;
    double a_lo = tables.action_at(t, tables.state_index(w, 0, zi));
    double a_hi = tables.action_at(t, tables.state_index(w_hi, 0, zi));
    ++report.checked;
    if (a_lo > a_hi + slack) {
      ++report.violations;
      if (report.examples.size() < 5) {
        report.examples.push_back("t=" + std::to_string(t) +
                                  " window=" + describe_window(tables.window_at(w)) +
                                  " raised=" + describe_window(tables.window_at(w_hi)) +
                                  " a=" + std::to_string(a_lo) + " vs " +
                                  std::to_string(a_hi));
      }
    }
  }
  return report;
}

void dump_tables_csv(const DpTables& tables, std::ostream& out, int stage) {
  out << "stage,window,dr_flag,z,action";
  if (tables.has_values()) out << ",value";
  out << "\n";
  for (std::size_t idx = 0; idx < tables.n_states(); ++idx) {
    State state = tables.state_at(idx);
    out << stage << ",\"";
    for (std::size_t i = 0; i < state.window.size(); ++i) {
      if (i > 0) out << ";";
      out << state.window[i];
    }
    out << "\"," << state.dr_flag << "," << state.z << ","
        << tables.action_at(stage, idx);
    if (tables.has_values()) out << "," << tables.value_at(stage, idx);
    out << "\n";
  }
}

}  // namespace drsim

#include "drsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "drsim/errors.hpp"

namespace drsim {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "data_csv",      "holidays_file", "dr_hour",       "season_days",
      "synthetic_days", "horizon_days", "p0",            "p1",
      "snr_db",        "n_paths",       "z_bins",        "y0",
      "method",        "window_y",      "x_values",      "r_values",
      "omega",         "u_check",       "a_hat_factor",  "solver",
      "n_actions",     "dp_y_cap",      "theta_min",     "theta_max",
      "theta_step",    "n_fit_paths",   "n_eval_paths",  "per_stage_theta",
      "seed",          "out_dir",
  };
  return keys;
}

json to_json_doc(const ExperimentConfig& c) {
  json j;
  j["data_csv"] = c.data_csv;
  j["holidays_file"] = c.holidays_file;
  j["dr_hour"] = c.dr_hour;
  j["season_days"] = c.season_days;
  j["synthetic_days"] = c.synthetic_days;
  j["horizon_days"] = c.horizon_days;
  j["p0"] = c.p0;
  j["p1"] = c.p1;
  j["snr_db"] = c.snr_db;
  j["n_paths"] = c.n_paths;
  j["z_bins"] = c.z_bins;
  j["y0"] = c.y0;
  j["method"] = c.method;
  j["window_y"] = c.window_y;
  j["x_values"] = c.x_values;
  j["r_values"] = c.r_values;
  j["omega"] = c.omega;
  j["u_check"] = c.u_check;
  j["a_hat_factor"] = c.a_hat_factor;
  j["solver"] = c.solver;
  j["n_actions"] = c.n_actions;
  j["dp_y_cap"] = c.dp_y_cap;
  j["theta_min"] = c.theta_min;
  j["theta_max"] = c.theta_max;
  j["theta_step"] = c.theta_step;
  j["n_fit_paths"] = c.n_fit_paths;
  j["n_eval_paths"] = c.n_eval_paths;
  j["per_stage_theta"] = c.per_stage_theta;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j;
}

template <typename T>
void read_key(const json& j, const char* key, T& into) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(into);
  } catch (const json::exception& e) {
    throw DataError(std::string("config key '") + key + "': " + e.what());
  }
}

ExperimentConfig from_json_doc(const json& j) {
  if (!j.is_object()) throw DataError("config root must be a JSON object");
  for (const auto& item : j.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw DataError("unknown config key '" + item.key() + "'");
    }
  }
  ExperimentConfig c;
  read_key(j, "data_csv", c.data_csv);
  read_key(j, "holidays_file", c.holidays_file);
  read_key(j, "dr_hour", c.dr_hour);
  read_key(j, "season_days", c.season_days);
  read_key(j, "synthetic_days", c.synthetic_days);
  read_key(j, "horizon_days", c.horizon_days);
  read_key(j, "p0", c.p0);
  read_key(j, "p1", c.p1);
  read_key(j, "snr_db", c.snr_db);
  read_key(j, "n_paths", c.n_paths);
  read_key(j, "z_bins", c.z_bins);
  read_key(j, "y0", c.y0);
  read_key(j, "method", c.method);
  read_key(j, "window_y", c.window_y);
  read_key(j, "x_values", c.x_values);
  read_key(j, "r_values", c.r_values);
  read_key(j, "omega", c.omega);
  read_key(j, "u_check", c.u_check);
  read_key(j, "a_hat_factor", c.a_hat_factor);
  read_key(j, "solver", c.solver);
  read_key(j, "n_actions", c.n_actions);
  read_key(j, "dp_y_cap", c.dp_y_cap);
  read_key(j, "theta_min", c.theta_min);
  read_key(j, "theta_max", c.theta_max);
  read_key(j, "theta_step", c.theta_step);
  read_key(j, "n_fit_paths", c.n_fit_paths);
  read_key(j, "n_eval_paths", c.n_eval_paths);
  read_key(j, "per_stage_theta", c.per_stage_theta);
  read_key(j, "seed", c.seed);
  read_key(j, "out_dir", c.out_dir);
  return c;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << config_to_json(config) << "\n";
  if (!out.good()) throw DataError("failed writing " + path);
}

std::string config_to_json(const ExperimentConfig& config) {
  return to_json_doc(config).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json_doc(j);
}

void validate_config(const ExperimentConfig& c) {
  if (c.dr_hour < 0 || c.dr_hour > 23) throw std::invalid_argument("dr_hour must be 0-23");
  if (c.season_days < 0) throw std::invalid_argument("season_days must be >= 0");
  if (c.synthetic_days < 1) throw std::invalid_argument("synthetic_days must be positive");
  if (c.horizon_days < 1) throw std::invalid_argument("horizon_days must be positive");
  if (!(c.p0 >= 0.0 && c.p0 <= 1.0) || !(c.p1 >= 0.0 && c.p1 <= 1.0)) {
    throw std::invalid_argument("chain probabilities must lie in [0, 1]");
  }
  if (std::isnan(c.snr_db)) throw std::invalid_argument("snr_db must be a number");
  if (c.n_paths < 1) throw std::invalid_argument("n_paths must be positive");
  if (c.z_bins < 1) throw std::invalid_argument("z_bins must be positive");
  if (c.y0 != 0 && c.y0 != 1) throw std::invalid_argument("y0 must be 0 or 1");
  method_from_string(c.method);
  if (c.window_y < 1) throw std::invalid_argument("window_y must be positive");
  for (int x : c.x_values) {
    if (x < 1 || x > c.window_y) {
      throw std::invalid_argument("x_values entries must lie in 1..window_y");
    }
  }
  if (c.r_values.empty()) throw std::invalid_argument("r_values must be nonempty");
  for (double r : c.r_values) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("rebate prices must be finite and >= 0");
    }
  }
  if (!(c.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(c.u_check > 0.0 && c.u_check < 1.0)) {
    throw std::invalid_argument("u_check must lie in (0, 1)");
  }
  if (!(c.a_hat_factor > 1.0)) throw std::invalid_argument("a_hat_factor must exceed 1");
  if (c.solver != "exact_dp" && c.solver != "rollout") {
    throw std::invalid_argument("solver must be exact_dp or rollout");
  }
  if (c.n_actions < 2) throw std::invalid_argument("n_actions must be at least 2");
  if (c.dp_y_cap < 1) throw std::invalid_argument("dp_y_cap must be positive");
  if (c.solver == "exact_dp" && c.window_y > c.dp_y_cap) {
    throw std::invalid_argument("window_y exceeds dp_y_cap; use the rollout solver");
  }
  if (!(c.theta_min >= 0.0 && c.theta_max <= 1.0 && c.theta_min <= c.theta_max)) {
    throw std::invalid_argument("theta range must satisfy 0 <= min <= max <= 1");
  }
  if (c.theta_min < c.theta_max && !(c.theta_step > 0.0)) {
    throw std::invalid_argument("theta_step must be positive");
  }
  if (c.n_fit_paths < 1) throw std::invalid_argument("n_fit_paths must be positive");
  if (c.n_eval_paths < 1) throw std::invalid_argument("n_eval_paths must be positive");
  if (c.out_dir.empty()) throw std::invalid_argument("out_dir must be set");
}

std::string config_hash(const ExperimentConfig& config) {
  std::string canon = to_json_doc(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BaselineMethod method_from_string(const std::string& name) {
  if (name == "high_x_of_y") return BaselineMethod::HighXofY;
  if (name == "low_x_of_y") return BaselineMethod::LowXofY;
  if (name == "mid_x_of_y") return BaselineMethod::MidXofY;
  if (name == "approx_high_x_of_y") return BaselineMethod::ApproxHighXofY;
  throw std::invalid_argument("unknown baseline method '" + name + "'");
}

std::string method_to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::HighXofY: return "high_x_of_y";
    case BaselineMethod::LowXofY: return "low_x_of_y";
    case BaselineMethod::MidXofY: return "mid_x_of_y";
    case BaselineMethod::ApproxHighXofY: return "approx_high_x_of_y";
  }
  throw std::logic_error("unknown baseline method");
}

std::vector<int> effective_x_values(const ExperimentConfig& config) {
  if (!config.x_values.empty()) return config.x_values;
  std::vector<int> xs;
  xs.reserve(static_cast<std::size_t>(config.window_y));
  for (int x = 1; x <= config.window_y; ++x) xs.push_back(x);
  return xs;
}

std::vector<double> theta_candidates(const ExperimentConfig& config) {
  std::vector<double> grid;
  if (config.theta_min == config.theta_max) {
    grid.push_back(config.theta_min);
    return grid;
  }
  long long n = std::llround((config.theta_max - config.theta_min) / config.theta_step);
  if (n < 1) n = 1;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i < n; ++i) {
    grid.push_back(config.theta_min + static_cast<double>(i) * config.theta_step);
  }
  grid.push_back(config.theta_max);
  return grid;
}

}  // namespace drsim

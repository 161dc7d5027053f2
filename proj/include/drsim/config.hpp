#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drsim/baseline.hpp"

// Experiment configuration: a flat JSON document whose defaults reproduce the
// reference case study (93-day horizon, 3 dB noise, p0=0.2/p1=0.4 event
// chain, 10-point action grid, $0.12/kWh retail and rebate prices).

namespace drsim {

inline constexpr const char* kDrsimVersion = "0.1.0";

struct ExperimentConfig {
  // data source; an empty csv path selects the built-in synthetic profile
  std::string data_csv;
  std::string holidays_file;
  int dr_hour = 9;
  int season_days = 93;
  int synthetic_days = 365;

  // scenario generation
  int horizon_days = 93;
  double p0 = 0.2;
  double p1 = 0.4;
  double snr_db = 3.0;
  int n_paths = 100;
  int z_bins = 3;
  int y0 = 0;

  // program family: bias curves sweep X over x_values for each rebate price
  std::string method = "high_x_of_y";
  int window_y = 5;
  std::vector<int> x_values;  // empty means 1..Y
  std::vector<double> r_values = {0.12};

  // utility estimation
  double omega = 0.12;
  double u_check = 0.99;
  double a_hat_factor = 1.5;

  // solver
  std::string solver = "exact_dp";
  int n_actions = 10;
  int dp_y_cap = 5;
  double theta_min = 0.0;
  double theta_max = 1.0;
  double theta_step = 0.001;
  int n_fit_paths = 10;
  int n_eval_paths = 1000;
  bool per_stage_theta = false;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

// throws DataError on unreadable files or malformed JSON, including unknown
// keys (typo protection)
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

// invariant checks shared by every subcommand; throws std::invalid_argument
void validate_config(const ExperimentConfig& config);

// FNV-1a hash of the canonical JSON rendering, as fixed-width hex
std::string config_hash(const ExperimentConfig& config);

BaselineMethod method_from_string(const std::string& name);
std::string method_to_string(BaselineMethod method);

// X sweep for the curve: x_values if given, else 1..Y
std::vector<int> effective_x_values(const ExperimentConfig& config);

// inclusive theta candidates from min to max in step increments
std::vector<double> theta_candidates(const ExperimentConfig& config);

}  // namespace drsim

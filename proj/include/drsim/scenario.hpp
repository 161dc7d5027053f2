#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "drsim/mdp.hpp"
#include "drsim/utility.hpp"

// Scenario construction: historical load ingestion, AWGN consumption paths,
// DR-event sequences from the two-state chain, and the z_t sequences that
// make each day's observed consumption the customer's intrinsic choice.

namespace drsim {

struct HistoryRecord {
  std::chrono::sys_seconds timestamp;
  double kwh = 0.0;
};

struct LoadFilters {
  bool weekdays_only = true;
  std::set<std::chrono::sys_days> holidays;
  // keep the consecutive span of this many qualifying days with the highest
  // total consumption (the peak season); 0 keeps everything
  int season_days = 93;
};

// Reads CSV `timestamp,kwh` (ISO-8601 timestamps), keeps rows at the given
// hour that pass the filters, sorted by time. Data problems name the row.
std::vector<HistoryRecord> load_history(const std::filesystem::path& csv_path, int hour,
                                        const LoadFilters& filters);

// Parses a holiday file, one ISO date per line; '#' starts a comment.
std::set<std::chrono::sys_days> load_holidays(const std::filesystem::path& path);

struct AwgnPaths {
  std::vector<std::vector<double>> paths;  // clamped at zero
  std::vector<std::vector<double>> noise;  // raw draws, kept for SNR audits
};

// Adds zero-mean Gaussian noise with variance mean(base^2) / 10^(snr_db/10);
// snr_db = +infinity reproduces the base unchanged.
AwgnPaths awgn_paths(std::span<const double> base, double snr_db, int n_paths,
                     std::uint64_t seed);

// Simulates the event chain; day 0 carries y0, transitions start on day 1.
std::vector<std::vector<std::uint8_t>> dr_sequences(int horizon_days, const DrChain& chain,
                                                    int n_paths, std::uint64_t seed,
                                                    int y0 = 0);

struct ScenarioPath {
  std::vector<double> consumption;
  std::vector<std::uint8_t> dr_flags;
  std::vector<double> z_values;
};

// The unique z making `a` the intrinsic baseline: z = (rho*omega/gamma) * e^(a/rho).
double z_for_consumption(double a, const UtilityParams& params);

struct DeriveZResult {
  std::vector<double> z_raw;
  std::vector<double> z_quantized;  // bin mean per element
  ZSet z_set;
  int clamped = 0;  // consumptions above a_hat, clamped before inversion
};

// Inverts every consumption to its z, then quantizes into `bins` bins split
// at empirical quantiles, each represented by its member mean.
DeriveZResult derive_z(std::span<const double> consumption, const UtilityParams& params,
                       int bins = 3);

// Built-in fallback when no history file is configured: a smooth, strictly
// positive morning-peak series with mild weekly and seasonal swing.
std::vector<double> synthetic_morning_peak(int days);

void write_paths_csv(const std::filesystem::path& path,
                     std::span<const ScenarioPath> paths);

}  // namespace drsim

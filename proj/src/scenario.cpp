#include "drsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "drsim/errors.hpp"
#include "drsim/rng.hpp"

namespace drsim {

namespace {

// accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM", optional ":SS"
bool parse_timestamp(const std::string& text, std::chrono::sys_seconds& out) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  char sep = 0;
  int fields = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &year, &month, &day, &sep,
                           &hour, &minute, &second);
  if (fields < 6 || (sep != ' ' && sep != 'T')) return false;
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                     std::chrono::day{unsigned(day)}};
  if (!ymd.ok()) return false;
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 60) {
    return false;
  }
  out = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<HistoryRecord> load_history(const std::filesystem::path& csv_path, int hour,
                                        const LoadFilters& filters) {
  if (hour < 0 || hour > 23) throw std::invalid_argument("hour must lie in 0..23");
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open history file " + csv_path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("history file is empty: " + csv_path.string());
  {
    std::istringstream header(line);
    std::string c0, c1;
    std::getline(header, c0, ',');
    std::getline(header, c1, ',');
    if (trim(c0) != "timestamp" || trim(c1).rfind("kwh", 0) != 0) {
      throw DataError("history file needs header `timestamp,kwh`, got `" + line + "`");
    }
  }

  std::vector<HistoryRecord> records;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string ts_text, kwh_text;
    if (!std::getline(fields, ts_text, ',') || !std::getline(fields, kwh_text, ',')) {
      throw DataError("row " + std::to_string(row) + ": expected `timestamp,kwh`");
    }
    std::chrono::sys_seconds ts;
    if (!parse_timestamp(trim(ts_text), ts)) {
      throw DataError("row " + std::to_string(row) + ": unparsable timestamp `" +
                      trim(ts_text) + "`");
    }
    double kwh = 0.0;
    try {
      std::size_t used = 0;
      kwh = std::stod(trim(kwh_text), &used);
      if (used != trim(kwh_text).size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw DataError("row " + std::to_string(row) + ": unparsable kwh `" +
                      trim(kwh_text) + "`");
    }
    if (!(kwh >= 0.0) || !std::isfinite(kwh)) {
      throw DataError("row " + std::to_string(row) + ": negative or non-finite kwh");
    }

    using namespace std::chrono;
    sys_days date = floor<days>(ts);
    auto tod = duration_cast<hours>(ts - date);
    if (tod.count() != hour) continue;
    weekday wd{date};
    if (filters.weekdays_only && (wd == Saturday || wd == Sunday)) continue;
    if (filters.holidays.count(date) > 0) continue;
    records.push_back(HistoryRecord{ts, kwh});
  }

  std::sort(records.begin(), records.end(),
            [](const HistoryRecord& a, const HistoryRecord& b) {
              return a.timestamp < b.timestamp;
            });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp == records[i - 1].timestamp) {
      throw DataError("duplicate timestamp in history at position " + std::to_string(i));
    }
  }

  if (filters.season_days > 0 &&
      records.size() > static_cast<std::size_t>(filters.season_days)) {
    std::size_t span = static_cast<std::size_t>(filters.season_days);
    double best_sum = 0.0;
    std::size_t best_begin = 0;
    double rolling = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      rolling += records[i].kwh;
      if (i + 1 < span) continue;
      if (i + 1 > span) rolling -= records[i - span].kwh;
      if (rolling > best_sum) {
        best_sum = rolling;
        best_begin = i + 1 - span;
      }
    }
    records.assign(records.begin() + static_cast<long>(best_begin),
                   records.begin() + static_cast<long>(best_begin + span));
  }
  return records;
}

std::set<std::chrono::sys_days> load_holidays(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open holiday file " + path.string());
  std::set<std::chrono::sys_days> days;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    int year = 0, month = 0, day = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d", &year, &month, &day) != 3) {
      throw DataError("holiday file row " + std::to_string(row) + ": expected YYYY-MM-DD");
    }
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                       std::chrono::day{unsigned(day)}};
    if (!ymd.ok()) {
      throw DataError("holiday file row " + std::to_string(row) + ": invalid date");
    }
    days.insert(sys_days{ymd});
  }
  return days;
}

AwgnPaths awgn_paths(std::span<const double> base, double snr_db, int n_paths,
                     std::uint64_t seed) {
  if (base.empty()) throw std::invalid_argument("base series must not be empty");
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  double signal_power = 0.0;
  for (double v : base) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("base series values must be finite and nonnegative");
    }
    signal_power += v * v;
  }
  signal_power /= static_cast<double>(base.size());
  double sigma = 0.0;
  if (!std::isinf(snr_db)) {
    sigma = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
  }

  AwgnPaths out;
  out.paths.resize(static_cast<std::size_t>(n_paths));
  out.noise.resize(static_cast<std::size_t>(n_paths));
  for (int p = 0; p < n_paths; ++p) {
    Rng rng(derive_seed(seed, stream::awgn, static_cast<std::uint64_t>(p)));
    auto& path = out.paths[static_cast<std::size_t>(p)];
    auto& noise = out.noise[static_cast<std::size_t>(p)];
    path.resize(base.size());
    noise.resize(base.size());
    for (std::size_t t = 0; t < base.size(); ++t) {
      double n = sigma == 0.0 ? 0.0 : sigma * rng.normal();
      noise[t] = n;
      path[t] = std::max(0.0, base[t] + n);
    }
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> dr_sequences(int horizon_days, const DrChain& chain,
                                                    int n_paths, std::uint64_t seed,
                                                    int y0) {
  if (horizon_days < 1) throw std::invalid_argument("horizon must cover at least one day");
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  if (y0 != 0 && y0 != 1) throw std::invalid_argument("y0 must be 0 or 1");
  validate_chain(chain);
  std::vector<std::vector<std::uint8_t>> out(static_cast<std::size_t>(n_paths));
  for (int p = 0; p < n_paths; ++p) {
    Rng rng(derive_seed(seed, stream::dr_flags, static_cast<std::uint64_t>(p)));
    auto& seq = out[static_cast<std::size_t>(p)];
    seq.resize(static_cast<std::size_t>(horizon_days));
    seq[0] = static_cast<std::uint8_t>(y0);
    for (int t = 1; t < horizon_days; ++t) {
      double p_event = seq[static_cast<std::size_t>(t - 1)] == 1 ? chain.p1 : chain.p0;
      seq[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(rng.bernoulli(p_event));
    }
  }
  return out;
}

double z_for_consumption(double a, const UtilityParams& params) {
  if (!(a >= 0.0)) throw std::invalid_argument("consumption must be >= 0");
  return params.rho * params.omega / params.gamma * std::exp(a / params.rho);
}

DeriveZResult derive_z(std::span<const double> consumption, const UtilityParams& params,
                       int bins) {
  if (consumption.empty()) throw DataError("cannot derive z from an empty sequence");
  if (bins < 1) throw std::invalid_argument("need at least one z bin");

  DeriveZResult result;
  result.z_raw.reserve(consumption.size());
  for (double a : consumption) {
    double clamped = a;
    if (a > params.a_hat) {
      clamped = params.a_hat;
      ++result.clamped;
    }
    result.z_raw.push_back(z_for_consumption(clamped, params));
  }

  // quantile edges over the observed z values
  std::vector<double> sorted = result.z_raw;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  std::vector<double> edges;
  for (int j = 1; j < bins; ++j) {
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(j) * static_cast<double>(n) / bins));
    if (rank == 0) rank = 1;
    edges.push_back(sorted[rank - 1]);
  }

  auto bin_of = [&edges](double z) {
    std::size_t k = 0;
    while (k < edges.size() && z > edges[k]) ++k;
    return k;
  };

  std::vector<double> bin_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<long> bin_count(static_cast<std::size_t>(bins), 0);
  std::vector<std::size_t> assignment(n);
  for (std::size_t i = 0; i < result.z_raw.size(); ++i) {
    std::size_t k = bin_of(result.z_raw[i]);
    assignment[i] = k;
    bin_sum[k] += result.z_raw[i];
    ++bin_count[k];
  }

  // empty bins drop out; adjacent bins that collapsed onto one value merge
  std::vector<double> means(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> remap(static_cast<std::size_t>(bins), 0);
  for (int k = 0; k < bins; ++k) {
    if (bin_count[static_cast<std::size_t>(k)] > 0) {
      means[static_cast<std::size_t>(k)] =
          bin_sum[static_cast<std::size_t>(k)] / bin_count[static_cast<std::size_t>(k)];
    }
  }
  long total = 0;
  for (int k = 0; k < bins; ++k) {
    std::size_t ku = static_cast<std::size_t>(k);
    if (bin_count[ku] == 0) {
      remap[ku] = result.z_set.values.size();
      continue;
    }
    if (!result.z_set.values.empty() &&
        means[ku] - result.z_set.values.back() <= 1e-12) {
      std::size_t last = result.z_set.values.size() - 1;
      double merged_count = result.z_set.probs[last] + bin_count[ku];
      result.z_set.values[last] =
          (result.z_set.values[last] * result.z_set.probs[last] +
           means[ku] * bin_count[ku]) /
          merged_count;
      result.z_set.probs[last] = merged_count;
      remap[ku] = last;
    } else {
      remap[ku] = result.z_set.values.size();
      result.z_set.values.push_back(means[ku]);
      result.z_set.probs.push_back(static_cast<double>(bin_count[ku]));
    }
    total += bin_count[ku];
  }
  for (double& p : result.z_set.probs) p /= static_cast<double>(total);

  result.z_quantized.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.z_quantized[i] = result.z_set.values[remap[assignment[i]]];
  }
  validate_z_set(result.z_set);
  return result;
}

std::vector<double> synthetic_morning_peak(int days) {
  if (days < 1) throw std::invalid_argument("need at least one day");
  std::vector<double> base(static_cast<std::size_t>(days));
  constexpr double kTwoPi = 6.28318530717958647692;
  // calibrated so a 93-day series has mean 2.96 kWh and peaks at 7.18 kWh,
  // with the floor kept well above zero
  double center = 0.55 * static_cast<double>(days);
  double width = 0.12 * static_cast<double>(days);
  for (int t = 0; t < days; ++t) {
    double u = static_cast<double>(t);
    double texture = 0.16 * std::sin(kTwoPi * u / 13.0 + 0.4) +
                     0.10 * std::sin(kTwoPi * u / 4.7 + 0.8);
    double arg = (u - center) / width;
    double heat = 2.6685 * std::exp(-arg * arg);
    base[static_cast<std::size_t>(t)] = 1.8852 * (1.0 + texture + heat);
  }
  return base;
}

void write_paths_csv(const std::filesystem::path& path,
                     std::span<const ScenarioPath> paths) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write paths file " + path.string());
  out << "path_id,day,consumption_kwh,dr_flag,z\n";
  char buffer[64];
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const ScenarioPath& sp = paths[p];
    for (std::size_t t = 0; t < sp.consumption.size(); ++t) {
      out << p << "," << t << ",";
      std::snprintf(buffer, sizeof(buffer), "%.12g", sp.consumption[t]);
      out << buffer << "," << int(sp.dr_flags[t]) << ",";
      std::snprintf(buffer, sizeof(buffer), "%.12g", sp.z_values[t]);
      out << buffer << "\n";
    }
  }
}

}  // namespace drsim

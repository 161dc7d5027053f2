#include "drsim/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace drsim {

namespace {

void check_window(std::span<const double> window, int x) {
  if (window.empty()) throw std::invalid_argument("window must not be empty");
  if (x < 1 || x > static_cast<int>(window.size())) {
    throw std::invalid_argument("X must lie in 1..Y, got X=" + std::to_string(x) +
                                " for Y=" + std::to_string(window.size()));
  }
  for (double v : window) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("window values must be finite and nonnegative");
    }
  }
}

void check_window_length(std::span<const double> window, int y) {
  if (static_cast<int>(window.size()) != y) {
    throw std::invalid_argument("window length " + std::to_string(window.size()) +
                                " does not match Y=" + std::to_string(y));
  }
}

std::vector<double> sorted_ascending(std::span<const double> window) {
  std::vector<double> values(window.begin(), window.end());
  std::stable_sort(values.begin(), values.end());
  return values;
}

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double median_of_sorted(const std::vector<double>& sorted) {
  std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

double window_mean(std::span<const double> window) {
  if (window.empty()) throw std::invalid_argument("window must not be empty");
  return mean_of(window);
}

double window_stddev(std::span<const double> window) {
  if (window.empty()) throw std::invalid_argument("window must not be empty");
  std::size_t n = window.size();
  if (n < 2) return 0.0;
  double mean = mean_of(window);
  double ss = 0.0;
  for (double v : window) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double high_x_of_y(std::span<const double> window, int x) {
  check_window(window, x);
  auto sorted = sorted_ascending(window);
  std::size_t n = sorted.size();
  double sum = 0.0;
  for (std::size_t i = n - static_cast<std::size_t>(x); i < n; ++i) sum += sorted[i];
  return sum / x;
}

double low_x_of_y(std::span<const double> window, int x) {
  check_window(window, x);
  auto sorted = sorted_ascending(window);
  double sum = 0.0;
  for (int i = 0; i < x; ++i) sum += sorted[static_cast<std::size_t>(i)];
  return sum / x;
}

double mid_x_of_y(std::span<const double> window, int x) {
  check_window(window, x);
  int y = static_cast<int>(window.size());
  if ((y - x) % 2 != 0) {
    throw std::invalid_argument("MidXofY needs X and Y of the same parity, got X=" +
                                std::to_string(x) + ", Y=" + std::to_string(y));
  }
  auto sorted = sorted_ascending(window);
  int skip = (y - x) / 2;
  double sum = 0.0;
  for (int i = skip; i < skip + x; ++i) sum += sorted[static_cast<std::size_t>(i)];
  return sum / x;
}

double approx_high_x_of_y(std::span<const double> window, int x, int y,
                          const TruncNormalSpec& spec) {
  if (y < 2) throw std::invalid_argument("approximated HighXofY needs Y >= 2");
  check_window_length(window, y);
  check_window(window, x);
  double mean = mean_of(window);
  double sd = window_stddev(window);
  if (sd == 0.0) return mean;
  double coef = static_cast<double>(y - x) / static_cast<double>(y - 1);
  return mean + coef * sample_max_factor(y, spec) * sd;
}

double approx_high_x_of_y(std::span<const double> window, int x, int y, double upper) {
  if (y < 2) throw std::invalid_argument("approximated HighXofY needs Y >= 2");
  check_window_length(window, y);
  check_window(window, x);
  double mean = mean_of(window);
  double sd = window_stddev(window);
  if (sd == 0.0) return mean;
  auto spec = make_trunc_spec(mean, std::max(sd, 1e-9), 0.0, upper);
  double coef = static_cast<double>(y - x) / static_cast<double>(y - 1);
  return mean + coef * sample_max_factor(y, spec) * sd;
}

double approx_low_x_of_y(std::span<const double> window, int x, int y) {
  if (y < 2) throw std::invalid_argument("approximated LowXofY needs Y >= 2");
  check_window_length(window, y);
  check_window(window, x);
  double lambda = static_cast<double>(x - 1) / static_cast<double>(y - 1);
  double low = *std::min_element(window.begin(), window.end());
  return lambda * mean_of(window) + (1.0 - lambda) * low;
}

double approx_mid_x_of_y(std::span<const double> window, int x, int y) {
  if (y < 2) throw std::invalid_argument("approximated MidXofY needs Y >= 2");
  check_window_length(window, y);
  check_window(window, x);
  double lambda = static_cast<double>(x - 1) / static_cast<double>(y - 1);
  auto sorted = sorted_ascending(window);
  return lambda * mean_of(window) + (1.0 - lambda) * median_of_sorted(sorted);
}

double approx_error_percent(double actual, double approx) {
  if (!(approx > 0.0)) throw std::domain_error("approximated baseline must be positive");
  return (actual - approx) / approx * 100.0;
}

void validate_program(const DrProgram& program) {
  if (program.y < 1) throw std::invalid_argument("program needs Y >= 1");
  if (program.x < 1 || program.x > program.y) {
    throw std::invalid_argument("program needs 1 <= X <= Y");
  }
  if (!(program.rebate_price >= 0.0) || !std::isfinite(program.rebate_price)) {
    throw std::invalid_argument("rebate price must be finite and >= 0");
  }
  if (program.method == BaselineMethod::MidXofY && (program.y - program.x) % 2 != 0) {
    throw std::invalid_argument("MidXofY program needs X and Y of the same parity");
  }
  if (program.method == BaselineMethod::ApproxHighXofY) {
    if (program.y < 2) throw std::invalid_argument("ApproxHighXofY program needs Y >= 2");
    if (!program.trunc_spec && !(program.approx_upper > 0.0)) {
      throw std::invalid_argument(
          "ApproxHighXofY program needs a truncation spec or a positive approx_upper");
    }
  }
}

double compute_baseline(std::span<const double> window, const DrProgram& program) {
  switch (program.method) {
    case BaselineMethod::HighXofY:
      return high_x_of_y(window, program.x);
    case BaselineMethod::LowXofY:
      return low_x_of_y(window, program.x);
    case BaselineMethod::MidXofY:
      return mid_x_of_y(window, program.x);
    case BaselineMethod::ApproxHighXofY:
      if (program.trunc_spec) {
        return approx_high_x_of_y(window, program.x, program.y, *program.trunc_spec);
      }
      return approx_high_x_of_y(window, program.x, program.y, program.approx_upper);
  }
  throw std::invalid_argument("unknown baseline method");
}

}  // namespace drsim

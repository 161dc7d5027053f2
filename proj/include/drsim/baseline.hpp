#pragma once

#include <optional>
#include <span>
#include <vector>

#include "drsim/trunc_normal.hpp"

// Average-style demand-response baselines over a window of the customer's
// last Y non-event-day consumptions (most recent first), plus the
// approximated HighXofY built from the truncated-normal sample-max factor.

namespace drsim {

using ConsumptionWindow = std::vector<double>;

enum class BaselineMethod { HighXofY, LowXofY, MidXofY, ApproxHighXofY };

struct DrProgram {
  int x = 5;
  int y = 5;
  double rebate_price = 0.12;  // $/kWh paid for consumption below baseline on event days
  BaselineMethod method = BaselineMethod::HighXofY;
  // ApproxHighXofY only: a fixed truncation spec, or a per-window plug-in fit
  // (mu = window mean, sigma = window st. dev., bounds [0, approx_upper])
  // when the spec is absent.
  std::optional<TruncNormalSpec> trunc_spec;
  double approx_upper = 0.0;
};

void validate_program(const DrProgram& program);

// mean of the X largest window values
double high_x_of_y(std::span<const double> window, int x);
// mean of the X smallest
double low_x_of_y(std::span<const double> window, int x);
// mean of the X middle values; X and Y must share parity
double mid_x_of_y(std::span<const double> window, int x);

// x_bar + ((Y-X)/(Y-1)) * f(Y) * s, with f(Y) from the given truncation spec
double approx_high_x_of_y(std::span<const double> window, int x, int y,
                          const TruncNormalSpec& spec);
// same, fitting the spec to the window with bounds [0, upper]
double approx_high_x_of_y(std::span<const double> window, int x, int y, double upper);

// lambda * x_bar + (1 - lambda) * min or median, lambda = (X-1)/(Y-1)
double approx_low_x_of_y(std::span<const double> window, int x, int y);
double approx_mid_x_of_y(std::span<const double> window, int x, int y);

// (actual - approx) / approx * 100
double approx_error_percent(double actual, double approx);

// dispatch on program.method
double compute_baseline(std::span<const double> window, const DrProgram& program);

double window_mean(std::span<const double> window);
// sample standard deviation, divisor Y-1; zero for Y = 1
double window_stddev(std::span<const double> window);

}  // namespace drsim

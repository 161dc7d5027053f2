#pragma once

#include <span>

// Exponential consumption utility u(a) = z * gamma * (1 - e^(-a/rho)) and the
// closed-form per-day optima built on it:
//
//   a_B   intrinsic baseline, argmax of net utility pi(a) = u(a) - omega * a
//   a_U   optimum when consumption below the DR baseline earns r per kWh,
//         i.e. argmax of pi(a) + r * (B - a); B drops out
//   B_th  threshold baseline: on an event day the customer curtails to a_U
//         exactly when the announced baseline reaches B_th

namespace drsim {

struct UtilityParams {
  double rho = 1.0;     // utility shape, kWh
  double gamma = 1.0;   // utility ratio, $ per unit utility
  double omega = 0.12;  // retail price, $/kWh
  double a_hat = 1.0;   // consumption cap, kWh
  double u_check = 0.99;  // maximum relative utility used in estimation
};

// Validates rho, gamma, omega, a_hat > 0 and 0 < u_check < 1.
UtilityParams make_utility_params(double rho, double gamma, double omega,
                                  double a_hat, double u_check);

double utility(double a, double z, const UtilityParams& params);
double net_utility(double a, double z, const UtilityParams& params);

// rho = -max(history)/ln(1 - u_check), gamma = omega * rho * e^(mean/rho),
// a_hat = a_hat_factor * max(history). Makes the history mean the maximizer
// of net utility at z = 1.
UtilityParams estimate_params(std::span<const double> history, double omega,
                              double u_check = 0.99, double a_hat_factor = 1.5);

double intrinsic_baseline(double z, const UtilityParams& params);
double penalized_optimum(double z, double r, const UtilityParams& params);

// +infinity when r = 0 (no curtailment incentive at any baseline)
double threshold_baseline(double z, double r, const UtilityParams& params);

// event-day action: a_B below the threshold, a_U at or above it
double dr_day_policy(double baseline, double z, double r, const UtilityParams& params);

}  // namespace drsim

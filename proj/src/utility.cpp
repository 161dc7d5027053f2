#include "drsim/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "drsim/errors.hpp"

namespace drsim {

namespace {

void check_z(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::invalid_argument("utility scale z must be finite and > 0");
  }
}

void check_r(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("rebate price must be finite and >= 0");
  }
}

double clamp_to_range(double a, double a_hat) {
  return std::min(std::max(a, 0.0), a_hat);
}

}  // namespace

UtilityParams make_utility_params(double rho, double gamma, double omega,
                                  double a_hat, double u_check) {
  if (!(rho > 0.0) || !(gamma > 0.0) || !(omega > 0.0) || !(a_hat > 0.0)) {
    throw std::invalid_argument("utility params rho, gamma, omega, a_hat must be > 0");
  }
  if (!(u_check > 0.0) || !(u_check < 1.0)) {
    throw std::invalid_argument("u_check must lie in (0, 1)");
  }
  return UtilityParams{rho, gamma, omega, a_hat, u_check};
}

double utility(double a, double z, const UtilityParams& params) {
  check_z(z);
  if (!(a >= 0.0) || a > params.a_hat * (1.0 + 1e-12)) {
    throw std::domain_error("consumption must lie in [0, a_hat], got " +
                            std::to_string(a));
  }
  return z * params.gamma * (1.0 - std::exp(-a / params.rho));
}

double net_utility(double a, double z, const UtilityParams& params) {
  return utility(a, z, params) - params.omega * a;
}

UtilityParams estimate_params(std::span<const double> history, double omega,
                              double u_check, double a_hat_factor) {
  if (history.empty()) throw DataError("cannot estimate utility from an empty history");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (!(u_check > 0.0) || !(u_check < 1.0)) {
    throw std::invalid_argument("u_check must lie in (0, 1)");
  }
  if (!(a_hat_factor > 1.0)) {
    throw std::invalid_argument("a_hat_factor must be > 1 so the cap exceeds the peak");
  }
  double peak = *std::max_element(history.begin(), history.end());
  double mean = std::accumulate(history.begin(), history.end(), 0.0) /
                static_cast<double>(history.size());
  if (!(peak > 0.0) || !(mean > 0.0)) {
    throw DataError("history must have positive mean and maximum");
  }
  double rho = -peak / std::log1p(-u_check);
  double gamma = omega * rho * std::exp(mean / rho);
  return make_utility_params(rho, gamma, omega, a_hat_factor * peak, u_check);
}

double intrinsic_baseline(double z, const UtilityParams& params) {
  check_z(z);
  double ratio = z * params.gamma / (params.rho * params.omega);
  if (ratio <= 1.0) return 0.0;
  return clamp_to_range(params.rho * std::log(ratio), params.a_hat);
}

double penalized_optimum(double z, double r, const UtilityParams& params) {
  check_z(z);
  check_r(r);
  double ratio = z * params.gamma / (params.rho * (params.omega + r));
  if (ratio <= 1.0) return 0.0;
  return clamp_to_range(params.rho * std::log(ratio), params.a_hat);
}

double threshold_baseline(double z, double r, const UtilityParams& params) {
  check_z(z);
  check_r(r);
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  double a_b = intrinsic_baseline(z, params);
  double a_u = penalized_optimum(z, r, params);
  double gap = net_utility(a_b, z, params) - net_utility(a_u, z, params);
  return gap / r + a_u;
}

double dr_day_policy(double baseline, double z, double r, const UtilityParams& params) {
  if (!(baseline >= 0.0)) throw std::invalid_argument("baseline must be >= 0");
  if (baseline < threshold_baseline(z, r, params)) return intrinsic_baseline(z, params);
  return penalized_optimum(z, r, params);
}

}  // namespace drsim

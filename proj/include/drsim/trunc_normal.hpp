#pragma once

#include <cstddef>

// Truncated normal machinery behind the approximated high-X-of-Y baseline.
//
// The approximation treats the Y window values as draws from a normal
// truncated to [lower, upper]. Everything here works on the standardized
// distribution N(0,1) truncated to [alpha, beta]:
//
//   cdf        F(u) = (Phi(u) - Phi(alpha)) / (Phi(beta) - Phi(alpha))
//   E[max]     expected largest of Y iid draws, via order-statistic
//              quadrature  Y * integral of u f(u) F(u)^(Y-1)
//   epsilon    the calibration constant with F^{-1}[(0.5+eps)^(1/Y)] equal to
//              E[max], found by bisection on (-0.5, 0.5)
//   factor     f(Y) = F^{-1}[(0.5+eps)^(1/Y)], the standardized sample-max
//              estimate the baseline formula scales by the window st. dev.

namespace drsim {

double norm_pdf(double x);
double norm_cdf(double x);

// Location/scale description of the truncation; alpha/beta are the
// standardized bounds the numerics run on.
struct TruncNormalSpec {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;
  double upper = 1.0;

  double alpha() const { return (lower - mu) / sigma; }
  double beta() const { return (upper - mu) / sigma; }
};

// Validates sigma > 0, lower < upper, all finite. Throws std::invalid_argument.
TruncNormalSpec make_trunc_spec(double mu, double sigma, double lower, double upper);

class TruncatedStdNormal {
 public:
  // standard normal truncated to [alpha, beta]; requires alpha < beta
  TruncatedStdNormal(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double pdf(double u) const;
  double cdf(double u) const;

  // inverse cdf by monotone bisection, |error| <= 5e-13
  double quantile(double p) const;

  // expected value of the largest of y iid draws; adaptive quadrature with
  // absolute tolerance 1e-9
  double expected_sample_max(int y) const;

 private:
  double alpha_;
  double beta_;
  double cdf_alpha_;
  double mass_;  // Phi(beta) - Phi(alpha)
};

// Bisects epsilon on (-0.5, 0.5) until the quantile identity above reproduces
// the quadrature value of E[max]; interval narrowed below 1e-10.
double estimate_epsilon(int y, const TruncNormalSpec& spec);

// f(y) for the spec's standardized bounds. Results are memoized behind a
// shared read-mostly cache keyed by (y, alpha, beta).
double sample_max_factor(int y, const TruncNormalSpec& spec);

}  // namespace drsim

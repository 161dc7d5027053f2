#include "drsim/trunc_normal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "drsim/errors.hpp"

namespace drsim {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// The standard normal has no mass worth integrating beyond this range; wide
// truncation intervals are clipped to it before quadrature so the adaptive
// subdivision is not spent on flat tails. Narrow intervals that sit entirely
// outside are kept as-is (the truncated density renormalizes there).
constexpr double kQuadRange = 40.0;

struct SimpsonPoint {
  double x;
  double fx;
};

template <class F>
double adaptive_simpson_rec(const F& f, SimpsonPoint a, SimpsonPoint b,
                            SimpsonPoint m, double whole, double tol, int depth) {
  SimpsonPoint lm{0.5 * (a.x + m.x), 0.0};
  SimpsonPoint rm{0.5 * (m.x + b.x), 0.0};
  lm.fx = f(lm.x);
  rm.fx = f(rm.x);
  double h = b.x - a.x;
  double left = (h / 12.0) * (a.fx + 4.0 * lm.fx + m.fx);
  double right = (h / 12.0) * (m.fx + 4.0 * rm.fx + b.fx);
  double delta = left + right - whole;
  if (depth <= 0) throw NumericError("adaptive quadrature did not converge");
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, lm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, rm, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double lo, double hi, double tol) {
  // seed with a uniform split so the recursion cannot miss a narrow bump
  constexpr int kPanels = 16;
  double total = 0.0;
  double width = (hi - lo) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    SimpsonPoint a{lo + i * width, 0.0};
    SimpsonPoint b{i + 1 == kPanels ? hi : lo + (i + 1) * width, 0.0};
    SimpsonPoint m{0.5 * (a.x + b.x), 0.0};
    a.fx = f(a.x);
    b.fx = f(b.x);
    m.fx = f(m.x);
    double whole = ((b.x - a.x) / 6.0) * (a.fx + 4.0 * m.fx + b.fx);
    total += adaptive_simpson_rec(f, a, b, m, whole, tol / kPanels, 48);
  }
  return total;
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

TruncNormalSpec make_trunc_spec(double mu, double sigma, double lower, double upper) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(lower) ||
      !std::isfinite(upper)) {
    throw std::invalid_argument("truncation spec values must be finite");
  }
  if (sigma <= 0.0) throw std::invalid_argument("truncation spec needs sigma > 0");
  if (!(lower < upper)) throw std::invalid_argument("truncation spec needs lower < upper");
  return TruncNormalSpec{mu, sigma, lower, upper};
}

TruncatedStdNormal::TruncatedStdNormal(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  if (!(alpha < beta) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("truncation bounds must be finite with alpha < beta");
  }
  cdf_alpha_ = norm_cdf(alpha_);
  mass_ = norm_cdf(beta_) - cdf_alpha_;
  if (!(mass_ > 0.0)) {
    throw NumericError("truncation interval carries no probability mass");
  }
}

double TruncatedStdNormal::pdf(double u) const {
  if (u < alpha_ || u > beta_) return 0.0;
  return norm_pdf(u) / mass_;
}

double TruncatedStdNormal::cdf(double u) const {
  if (u <= alpha_) return 0.0;
  if (u >= beta_) return 1.0;
  return (norm_cdf(u) - cdf_alpha_) / mass_;
}

double TruncatedStdNormal::quantile(double p) const {
  if (p <= 0.0) return alpha_;
  if (p >= 1.0) return beta_;
  double lo = alpha_;
  double hi = beta_;
  for (int iter = 0; iter < 240 && hi - lo > 1e-13; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double TruncatedStdNormal::expected_sample_max(int y) const {
  if (y < 1) throw std::invalid_argument("sample size must be >= 1");
  double lo = alpha_;
  double hi = beta_;
  if (lo < -kQuadRange && -kQuadRange < hi) lo = -kQuadRange;
  if (hi > kQuadRange && kQuadRange > lo) hi = kQuadRange;
  auto integrand = [this, y](double u) {
    double f = cdf(u);
    double tail = y > 1 ? std::pow(f, y - 1) : 1.0;
    return y * u * pdf(u) * tail;
  };
  return adaptive_simpson(integrand, lo, hi, 1e-9);
}

double estimate_epsilon(int y, const TruncNormalSpec& spec) {
  if (y < 1) throw std::invalid_argument("sample size must be >= 1");
  TruncatedStdNormal dist(spec.alpha(), spec.beta());
  double target = dist.expected_sample_max(y);
  double inv_y = 1.0 / static_cast<double>(y);
  double lo = -0.5;
  double hi = 0.5;
  // quantile(p) - target is increasing in eps; endpoints bracket because the
  // expected maximum lies strictly inside (alpha, beta)
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    double value = dist.quantile(std::pow(0.5 + mid, inv_y));
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

std::mutex factor_cache_mutex;
std::map<std::tuple<int, double, double>, double>& factor_cache() {
  static std::map<std::tuple<int, double, double>, double> cache;
  return cache;
}

}  // namespace

double sample_max_factor(int y, const TruncNormalSpec& spec) {
  std::tuple<int, double, double> key{y, spec.alpha(), spec.beta()};
  {
    std::lock_guard<std::mutex> lock(factor_cache_mutex);
    auto it = factor_cache().find(key);
    if (it != factor_cache().end()) return it->second;
  }
  double eps = estimate_epsilon(y, spec);
  TruncatedStdNormal dist(spec.alpha(), spec.beta());
  double factor = dist.quantile(std::pow(0.5 + eps, 1.0 / static_cast<double>(y)));
  std::lock_guard<std::mutex> lock(factor_cache_mutex);
  factor_cache().emplace(key, factor);
  return factor;
}

}  // namespace drsim

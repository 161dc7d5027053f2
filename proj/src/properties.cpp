#include "drsim/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "drsim/rng.hpp"

namespace drsim {

namespace {

constexpr double kTol = 1e-9;

// stable ids feeding the per-case seed derivation; appending only
enum PropId : std::uint64_t {
  kMonotone = 1,
  kConvex = 2,
  kModular = 3,
  kApproxX = 4,
  kApproxShift = 5,
  kApproxMixed = 6,
  kFactorShape = 7,
  kUtilityOrder = 8,
  kApproxComponent = 9,
  kApproxSubmodular = 10,
};

Rng case_rng(std::uint64_t seed, std::uint64_t prop_id, long long k) {
  return Rng(derive_seed(seed, stream::property_check, prop_id,
                         static_cast<std::uint64_t>(k)));
}

std::vector<double> random_window(Rng& rng, int y, double scale = 5.0) {
  std::vector<double> w(static_cast<std::size_t>(y));
  for (double& v : w) v = scale * rng.uniform01();
  return w;
}

std::string describe_window(const std::vector<double>& w) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i + 1 < w.size() ? "%.6g, " : "%.6g", w[i]);
    out += buf;
  }
  out += ")";
  return out;
}

void record(PropertyReport& report, long long k, const std::string& detail) {
  ++report.violations;
  if (report.examples.size() < 5) {
    report.examples.push_back(PropertyCase{k, detail});
  }
}

// shared fixed truncation spec for the approximated-baseline checks; the
// plug-in variant refits the spec per window, which would break the exact
// shift identities below
const TruncNormalSpec& fixed_spec() {
  static const TruncNormalSpec spec = make_trunc_spec(2.5, 1.2, 0.0, 20.0);
  return spec;
}

}  // namespace

PropertyReport prop_baseline_monotone(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "baseline_monotone";
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kMonotone, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    std::vector<double> lo = random_window(rng, y);
    std::vector<double> hi = lo;
    for (double& v : hi) v += 2.0 * rng.uniform01();

    ++report.checked;
    bool bad = false;
    for (int x = 1; x <= y && !bad; ++x) {
      if (high_x_of_y(lo, x) > high_x_of_y(hi, x) + kTol) bad = true;
      if (low_x_of_y(lo, x) > low_x_of_y(hi, x) + kTol) bad = true;
      if ((y - x) % 2 == 0 && mid_x_of_y(lo, x) > mid_x_of_y(hi, x) + kTol) bad = true;
    }
    for (int x = 1; x < y && !bad; ++x) {
      if (high_x_of_y(lo, x + 1) > high_x_of_y(lo, x) + kTol) bad = true;
      if (low_x_of_y(lo, x + 1) < low_x_of_y(lo, x) - kTol) bad = true;
    }
    if (bad) record(report, k, "windows " + describe_window(lo) + " <= " + describe_window(hi));
  }
  return report;
}

PropertyReport prop_baseline_convex(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "baseline_convex";
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kConvex, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    std::vector<double> a = random_window(rng, y);
    std::vector<double> b = random_window(rng, y);
    double lam = rng.uniform01();
    std::vector<double> mix(static_cast<std::size_t>(y));
    for (int i = 0; i < y; ++i) {
      mix[static_cast<std::size_t>(i)] = lam * a[static_cast<std::size_t>(i)] +
                                         (1.0 - lam) * b[static_cast<std::size_t>(i)];
    }

    ++report.checked;
    bool bad = false;
    for (int x = 1; x <= y && !bad; ++x) {
      double h_mix = high_x_of_y(mix, x);
      double h_chord = lam * high_x_of_y(a, x) + (1.0 - lam) * high_x_of_y(b, x);
      if (h_mix > h_chord + kTol) bad = true;
      double l_mix = low_x_of_y(mix, x);
      double l_chord = lam * low_x_of_y(a, x) + (1.0 - lam) * low_x_of_y(b, x);
      if (l_mix < l_chord - kTol) bad = true;
    }
    if (bad) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "lambda %.6g windows ", lam);
      record(report, k, buf + describe_window(a) + " " + describe_window(b));
    }
  }
  return report;
}

PropertyReport prop_baseline_modular(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "baseline_modular";
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kModular, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    std::vector<double> a = random_window(rng, y);
    std::vector<double> b = random_window(rng, y);
    std::vector<double> join(static_cast<std::size_t>(y));
    std::vector<double> meet(static_cast<std::size_t>(y));
    for (int i = 0; i < y; ++i) {
      std::size_t j = static_cast<std::size_t>(i);
      join[j] = std::max(a[j], b[j]);
      meet[j] = std::min(a[j], b[j]);
    }

    ++report.checked;
    bool bad = false;
    for (int x = 1; x <= y && !bad; ++x) {
      if (high_x_of_y(a, x) + high_x_of_y(b, x) <
          high_x_of_y(join, x) + high_x_of_y(meet, x) - kTol) {
        bad = true;
      }
      if (low_x_of_y(a, x) + low_x_of_y(b, x) >
          low_x_of_y(join, x) + low_x_of_y(meet, x) + kTol) {
        bad = true;
      }
    }
    if (bad) record(report, k, "windows " + describe_window(a) + " " + describe_window(b));
  }
  return report;
}

PropertyReport prop_approx_x_monotone(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "approx_x_monotone";
  const TruncNormalSpec& spec = fixed_spec();
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kApproxX, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    std::vector<double> w = random_window(rng, y);

    ++report.checked;
    bool bad = false;
    double prev = approx_high_x_of_y(w, 1, y, spec);
    double expect_x1 = window_mean(w) + sample_max_factor(y, spec) * window_stddev(w);
    if (std::abs(prev - expect_x1) > kTol) bad = true;
    for (int x = 2; x <= y && !bad; ++x) {
      double cur = approx_high_x_of_y(w, x, y, spec);
      if (cur > prev + kTol) bad = true;
      prev = cur;
    }
    if (!bad && std::abs(prev - window_mean(w)) > kTol) bad = true;
    if (bad) record(report, k, "window " + describe_window(w));
  }
  return report;
}

PropertyReport prop_approx_translation_scaling(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "approx_translation_scaling";
  const TruncNormalSpec& spec = fixed_spec();
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kApproxShift, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    int x = 1 + static_cast<int>(rng.raw() % static_cast<unsigned>(y));
    std::vector<double> w = random_window(rng, y);
    double c = 0.1 + 3.0 * rng.uniform01();
    double k_scale = 1.0 + 2.0 * rng.uniform01();

    std::vector<double> shifted = w;
    for (double& v : shifted) v += c;
    std::vector<double> scaled = w;
    for (double& v : scaled) v *= k_scale;

    ++report.checked;
    double base = approx_high_x_of_y(w, x, y, spec);
    bool bad = std::abs(approx_high_x_of_y(shifted, x, y, spec) - (base + c)) > kTol;
    if (approx_high_x_of_y(scaled, x, y, spec) < base - kTol) bad = true;
    if (bad) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "X=%d c=%.6g k=%.6g window ", x, c, k_scale);
      record(report, k, buf + describe_window(w));
    }
  }
  return report;
}

PropertyReport prop_approx_mixed_difference(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "approx_mixed_difference";
  const TruncNormalSpec& spec = fixed_spec();
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kApproxMixed, k);
    int y = 3 + static_cast<int>(rng.raw() % 6);
    int x = 1 + static_cast<int>(rng.raw() % static_cast<unsigned>(y - 1));
    std::vector<double> w = random_window(rng, y);
    std::size_t i = static_cast<std::size_t>(rng.raw() % static_cast<unsigned>(y));

    double others = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j != i) others += w[j];
    }
    others /= static_cast<double>(y - 1);

    // stay on one side of the pivot so the stddev moves one way
    bool below = w[i] < others;
    double delta;
    if (below) {
      delta = 0.5 * (others - w[i]);
      if (delta <= 0.0) continue;
    } else {
      delta = 0.5 + rng.uniform01();
    }

    std::vector<double> bumped = w;
    bumped[i] += delta;

    ++report.checked;
    double d_hi = approx_high_x_of_y(bumped, x + 1, y, spec) -
                  approx_high_x_of_y(w, x + 1, y, spec);
    double d_lo =
        approx_high_x_of_y(bumped, x, y, spec) - approx_high_x_of_y(w, x, y, spec);
    double mixed = d_hi - d_lo;
    bool bad = below ? mixed < -kTol : mixed > kTol;
    if (bad) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "i=%zu X=%d delta=%.6g window ", i, x, delta);
      record(report, k, buf + describe_window(w));
    }
  }
  return report;
}

PropertyReport prop_sample_max_factor_shape(long long, std::uint64_t) {
  PropertyReport report;
  report.name = "sample_max_factor_shape";
  const TruncNormalSpec& spec = fixed_spec();
  std::vector<double> f(16);
  for (int y = 1; y <= 15; ++y) {
    f[static_cast<std::size_t>(y)] = sample_max_factor(y, spec);
  }
  for (int y = 2; y <= 15; ++y) {
    ++report.checked;
    if (f[static_cast<std::size_t>(y)] <= f[static_cast<std::size_t>(y - 1)]) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "f(%d)=%.9g vs f(%d)=%.9g", y - 1,
                    f[static_cast<std::size_t>(y - 1)], y, f[static_cast<std::size_t>(y)]);
      record(report, y, buf);
    }
  }
  for (int y = 3; y <= 15; ++y) {
    ++report.checked;
    double prev = f[static_cast<std::size_t>(y - 1)] / (y - 1);
    double cur = f[static_cast<std::size_t>(y)] / y;
    if (cur >= prev) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "f(%d)/%d=%.9g vs f(%d)/%d=%.9g", y - 1, y - 1,
                    prev, y, y, cur);
      record(report, y, buf);
    }
  }
  return report;
}

PropertyReport prop_utility_ordering(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "utility_ordering";
  UtilityParams params = make_utility_params(1.5591, 1.2492, 0.12, 10.77, 0.99);
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kUtilityOrder, k);
    double z = 0.3 + 2.0 * rng.uniform01();
    double r = 0.01 + 0.4 * rng.uniform01();

    ++report.checked;
    double a_b = intrinsic_baseline(z, params);
    double a_u = penalized_optimum(z, r, params);
    double b_th = threshold_baseline(z, r, params);
    bool bad = a_u > a_b + kTol || a_u > b_th + kTol || b_th < 0.0;
    if (bad) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "z=%.6g r=%.6g aB=%.6g aU=%.6g Bth=%.6g", z, r,
                    a_b, a_u, b_th);
      record(report, k, buf);
    }
  }
  return report;
}

PropertyReport prop_approx_componentwise(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "approx_componentwise";
  report.hard = false;
  const TruncNormalSpec& spec = fixed_spec();
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kApproxComponent, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    int x = 1 + static_cast<int>(rng.raw() % static_cast<unsigned>(y));
    std::vector<double> w = random_window(rng, y);
    std::size_t i = static_cast<std::size_t>(rng.raw() % static_cast<unsigned>(y));
    double delta = 0.01 + rng.uniform01();
    std::vector<double> bumped = w;
    bumped[i] += delta;

    ++report.checked;
    if (approx_high_x_of_y(bumped, x, y, spec) <
        approx_high_x_of_y(w, x, y, spec) - kTol) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "i=%zu X=%d delta=%.6g window ", i, x, delta);
      record(report, k, buf + describe_window(w));
    }
  }
  return report;
}

PropertyReport prop_approx_submodular(long long n_samples, std::uint64_t seed) {
  PropertyReport report;
  report.name = "approx_submodular";
  report.hard = false;
  const TruncNormalSpec& spec = fixed_spec();
  for (long long k = 0; k < n_samples; ++k) {
    Rng rng = case_rng(seed, kApproxSubmodular, k);
    int y = 2 + static_cast<int>(rng.raw() % 7);
    int x = 1 + static_cast<int>(rng.raw() % static_cast<unsigned>(y));
    std::vector<double> a = random_window(rng, y);
    std::vector<double> b = random_window(rng, y);
    std::vector<double> join(static_cast<std::size_t>(y));
    std::vector<double> meet(static_cast<std::size_t>(y));
    for (std::size_t j = 0; j < a.size(); ++j) {
      join[j] = std::max(a[j], b[j]);
      meet[j] = std::min(a[j], b[j]);
    }

    ++report.checked;
    if (approx_high_x_of_y(a, x, y, spec) + approx_high_x_of_y(b, x, y, spec) <
        approx_high_x_of_y(join, x, y, spec) + approx_high_x_of_y(meet, x, y, spec) -
            kTol) {
      record(report, k, "X=" + std::to_string(x) + " windows " + describe_window(a) +
                            " " + describe_window(b));
    }
  }
  return report;
}

std::span<const PropertyEntry> property_registry() {
  static const PropertyEntry entries[] = {
      {"baseline_monotone", prop_baseline_monotone, true},
      {"baseline_convex", prop_baseline_convex, true},
      {"baseline_modular", prop_baseline_modular, true},
      {"approx_x_monotone", prop_approx_x_monotone, true},
      {"approx_translation_scaling", prop_approx_translation_scaling, true},
      {"approx_mixed_difference", prop_approx_mixed_difference, true},
      {"sample_max_factor_shape", prop_sample_max_factor_shape, true},
      {"utility_ordering", prop_utility_ordering, true},
      {"approx_componentwise", prop_approx_componentwise, false},
      {"approx_submodular", prop_approx_submodular, false},
  };
  return entries;
}

}  // namespace drsim

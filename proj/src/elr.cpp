#include "facepix/elr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "facepix/mmd.hpp"

namespace facepix {

LambdaRoot solve_lambda(std::span<const double> h) {
  if (h.empty()) throw std::invalid_argument("solve_lambda needs a non-empty h");
  double hmin = h[0], hmax = h[0];
  for (double v : h) {
    hmin = std::min(hmin, v);
    hmax = std::max(hmax, v);
  }
  if (hmin == 0.0 && hmax == 0.0) return LambdaRoot{true, 0.0};
  // zero must lie strictly inside the convex hull of h
  if (hmin >= 0.0 || hmax <= 0.0) return LambdaRoot{false, 0.0};

  const double lo = -1.0 / hmax;
  const double hi = -1.0 / hmin;
  auto g = [&](double lambda) {
    double s = 0.0;
    for (double v : h) s += v / (1.0 + lambda * v);
    return s;
  };

  // g is strictly decreasing on (lo, hi), +inf at lo, -inf at hi
  double a = lo + (hi - lo) * 1e-12;
  double b = hi - (hi - lo) * 1e-12;
  // roots crowded against a boundary need tighter brackets
  for (int shrink = 0; g(a) < 0.0 && shrink < 60; ++shrink) a = lo + (a - lo) / 1024.0;
  for (int shrink = 0; g(b) > 0.0 && shrink < 60; ++shrink) b = hi - (hi - b) / 1024.0;
  if (g(a) < 0.0) return LambdaRoot{true, a};
  if (g(b) > 0.0) return LambdaRoot{true, b};
  double lambda = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    lambda = 0.5 * (a + b);
    const double gm = g(lambda);
    if (std::fabs(gm) <= 1e-10) return LambdaRoot{true, lambda};
    if (gm > 0.0)
      a = lambda;
    else
      b = lambda;
    if (b - a <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(a))) break;
  }
  return LambdaRoot{true, 0.5 * (a + b)};
}

double elr_statistic(std::span<const double> h, const LambdaRoot& root) {
  if (!root.found) return std::numeric_limits<double>::infinity();
  double t = 0.0;
  for (double v : h) t += std::log1p(root.lambda * v);
  return 2.0 * t;
}

std::vector<double> elr_weights(std::span<const double> h, const LambdaRoot& root) {
  if (!root.found) return {};
  const double n = static_cast<double>(h.size());
  std::vector<double> p(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) p[i] = 1.0 / (n * (1.0 + root.lambda * h[i]));
  return p;
}

// Wichura's AS 241 (PPND16), double-precision inverse normal CDF.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile needs p in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
             4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
             2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
             1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
             1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
             2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
             7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

double chi2_quantile_df1(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must be in (0,1)");
  const double z = normal_quantile((1.0 + confidence) / 2.0);
  return z * z;
}

double chi2_cdf_df1(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(x / 2.0));
}

ELRResult elr_two_sample_test(const std::vector<std::vector<double>>& x,
                              const std::vector<std::vector<double>>& y, double threshold) {
  ELRResult res;
  res.threshold = threshold;
  if (y.size() < 2) {
    res.t_elr = std::numeric_limits<double>::infinity();
    res.decision = TestDecision::reject;
    res.reason = "too_short";
    return res;
  }
  if (x.size() != y.size())
    throw std::invalid_argument("elr_two_sample_test needs equally sized paired samples");

  std::vector<std::vector<double>> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  double bandwidth = median_pairwise_distance(pooled);
  if (bandwidth <= 0.0) bandwidth = 1.0;  // identical points: every kernel is 1

  res.h = mmd_h(x, y, bandwidth);
  const LambdaRoot root = solve_lambda(res.h);
  res.lambda_found = root.found;
  res.lambda = root.lambda;
  res.weights = elr_weights(res.h, root);
  res.t_elr = elr_statistic(res.h, root);
  if (res.t_elr < threshold) {
    res.decision = TestDecision::accept;
  } else {
    res.decision = TestDecision::reject;
    res.reason = root.found ? "statistic_above_threshold" : "no_root";
  }
  return res;
}

}  // namespace facepix

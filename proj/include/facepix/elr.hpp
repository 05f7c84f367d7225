#pragma once

#include <span>
#include <string>
#include <vector>

namespace facepix {

struct LambdaRoot {
  bool found = false;
  double lambda = 0.0;
};

// Solves sum h_i / (1 + lambda h_i) = 0 on the interval where all
// 1 + lambda h_i > 0 (safeguarded bisection, |g| <= 1e-10). No root exists
// when 0 lies outside the convex hull of h (all one sign).
LambdaRoot solve_lambda(std::span<const double> h);

// Wilks-normalized empirical likelihood ratio 2 * sum log(1 + lambda h_i);
// +infinity when no root exists. Asymptotically chi-square with 1 dof.
double elr_statistic(std::span<const double> h, const LambdaRoot& root);

// Observation weights p_i = 1/(n (1 + lambda h_i)).
std::vector<double> elr_weights(std::span<const double> h, const LambdaRoot& root);

double normal_quantile(double p);            // inverse standard normal CDF
double chi2_quantile_df1(double confidence); // e.g. 0.95 -> 3.841...
double chi2_cdf_df1(double x);

enum class TestDecision { accept, reject };

struct ELRResult {
  std::vector<double> h;
  bool lambda_found = false;
  double lambda = 0.0;
  std::vector<double> weights;  // p_i, empty when no root
  double t_elr = 0.0;           // +inf when no root
  double threshold = 0.0;
  TestDecision decision = TestDecision::reject;
  std::string reason;  // "", "too_short", "no_root", "statistic_above_threshold"
};

// Two-sample test on paired 32-dim feature rows: H0 = both samples come from
// one population. Kernel bandwidth is the median pairwise distance over the
// pooled rows. Accept iff T_ELR < threshold.
ELRResult elr_two_sample_test(const std::vector<std::vector<double>>& x,
                              const std::vector<std::vector<double>>& y, double threshold);

}  // namespace facepix

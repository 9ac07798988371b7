#pragma once

#include <span>

namespace abeam {

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1). Needs at least two samples.
double sample_stddev(std::span<const double> xs);

/// Half-width of the 95% confidence interval of the mean:
/// t_{0.975, n-1} * s / sqrt(n). Throws std::invalid_argument for n < 2.
double ci95_half_width(std::span<const double> xs);

struct TTestResult {
  double t = 0;
  double p = 1;
  int df = 0;
  bool degenerate = false;  // zero pooled variance with different means
};

/// Two-sample Student's t-test with pooled variance, two-sided:
///   sp^2 = ((na-1) sa^2 + (nb-1) sb^2) / (na + nb - 2)
///   t = (mean_a - mean_b) / (sp * sqrt(1/na + 1/nb)),  df = na + nb - 2
///   p = 2 * (1 - F_t(|t|; df))
/// With zero pooled variance: equal means give t = 0, p = 1; different
/// means give p = 0, t = +-inf and `degenerate`.
TTestResult t_test(std::span<const double> a, std::span<const double> b);

}  // namespace abeam

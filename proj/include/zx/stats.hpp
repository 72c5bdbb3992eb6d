#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace zx {

struct EstimateCI {
  double value = 0.0;
  double se = 0.0;
  double lo = 0.0;  // 95% interval
  double hi = 0.0;
  uint64_t n = 0;
};

// Fixed-order pairwise tree reduction: result depends only on the array
// contents, never on thread scheduling.
double pairwise_sum(std::span<const double> v);

EstimateCI mean_ci(std::span<const double> v);

// Wilson score interval for a binomial proportion (95%).
EstimateCI binomial_ci(uint64_t successes, uint64_t trials);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct LinFit {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
};

// Weighted least squares for y = intercept + slope * x; weights are inverse
// variances of the y values.
LinFit wls_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> w);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);
double interquartile_range(std::vector<double> v);

}  // namespace zx

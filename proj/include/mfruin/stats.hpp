#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mfruin {

// Pairwise (cascade) summation: deterministic for a fixed element order and
// far smaller rounding drift than a running sum at Monte Carlo sizes.
double pairwise_sum(const double* data, long count);
double pairwise_sum(const Eigen::Ref<const Eigen::VectorXd>& v);
double pairwise_sum(const std::vector<double>& v);

struct SampleStats {
  long count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1)
  double std_err = 0.0;   // of the mean
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw (normal = 3)
};

SampleStats sample_stats(const std::vector<double>& v);

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

double normal_cdf(double x);
// Inverse standard-normal CDF (Acklam's rational approximation polished by
// one Halley step; ~1e-15 absolute accuracy).
double normal_quantile(double p);

// Jarque-Bera omnibus normality statistic, ~chi^2(2) under the null.
double jarque_bera(const SampleStats& s);
// Rejection check at significance 0.01 (chi^2_2 critical value 9.21034).
bool jarque_bera_rejects_1pct(const SampleStats& s);

}  // namespace mfruin

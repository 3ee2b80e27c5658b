#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfruin/grid.hpp"
#include "mfruin/kernel.hpp"

namespace mfruin {

struct DriftEstimate {
  double value = 0.0;
  double variance = 0.0;       // exact estimator variance, not asymptotic
  std::string method;          // "discrete_level" | "kernel_increment"
  int steps = 0;
  double h = 0.0;
  double hurst = 0.0;
  double sigma = 0.0;
};

// GLS drift estimate from observed levels Y_{t_k} = theta*t_k - xi_{t_k}:
//   theta_hat = t^T G^-1 Y / t^T G^-1 t,  Var = 1 / (t^T G^-1 t),
// with G the level covariance.
DriftEstimate mle_discrete(const Eigen::Ref<const Eigen::VectorXd>& levels,
                           const GridSpec& grid, double hurst, double sigma);

// Quasi-continuous form on increments dY, using the final weight row:
//   theta_hat = phi . dY / (h * sum(phi)),  Var = sigma / (h * sum(phi)).
// Algebraically identical to mle_discrete (GLS is invariant under the
// invertible cumulative-sum map).
DriftEstimate mle_kernel(const Eigen::Ref<const Eigen::VectorXd>& increments,
                         const KernelWeightTable& table);

// lambda_H = 2H G(H+1/2) G(3-2H) / G(3/2-H): the distributional limit of
// T'^{2-2H} Var(theta_hat).
double asymptotic_variance_constant(double hurst);

// (theta_hat - theta) / sqrt(variance); N(0,1) in the large-sample limit.
double normalized_stat(double theta_hat, double theta_true, double variance);

// Deterministic table of (N, Var(theta_hat)) = (N, 1/(t^T G^-1 t)) at fixed
// step h; log-log slope approaches 2H-2.
std::vector<std::pair<int, double>> variance_rate_scan(
    double hurst, double sigma, double h, const std::vector<int>& sizes);

}  // namespace mfruin

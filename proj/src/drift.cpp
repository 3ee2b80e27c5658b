#include "mfruin/drift.hpp"

#include <cmath>
#include <stdexcept>

#include "mfruin/covariance.hpp"
#include "mfruin/errors.hpp"
#include "mfruin/linsolve.hpp"

namespace mfruin {

DriftEstimate mle_discrete(const Eigen::Ref<const Eigen::VectorXd>& levels,
                           const GridSpec& grid, double hurst, double sigma) {
  grid.validate();
  if (levels.size() != grid.steps)
    throw std::invalid_argument("mle_discrete: expected one level per step");
  const int n = grid.steps;
  const double h = grid.step();

  Eigen::VectorXd t(n);
  for (int k = 1; k <= n; ++k) t(k - 1) = h * k;

  Eigen::MatrixXd gamma = level_covariance(n, hurst, sigma, h);
  Eigen::VectorXd w = spd_solve(gamma, t);  // G^-1 t
  const double quad = w.dot(t);             // t^T G^-1 t
  if (!(quad > 0.0))
    throw numerical_error("mle_discrete: nonpositive information t^T G^-1 t");

  DriftEstimate est;
  est.value = w.dot(levels) / quad;
  est.variance = 1.0 / quad;
  est.method = "discrete_level";
  est.steps = n;
  est.h = h;
  est.hurst = hurst;
  est.sigma = sigma;
  return est;
}

DriftEstimate mle_kernel(const Eigen::Ref<const Eigen::VectorXd>& increments,
                         const KernelWeightTable& table) {
  const int n = table.horizons();
  if (increments.size() != n)
    throw std::invalid_argument(
        "mle_kernel: expected one increment per table horizon");
  const Eigen::VectorXd& phi = table.weights(n);
  const double h = table.grid.step();
  const double weight_mass = h * phi.sum();
  if (!(weight_mass > 0.0))
    throw numerical_error("mle_kernel: nonpositive weight sum");

  DriftEstimate est;
  est.value = phi.dot(increments) / weight_mass;
  est.variance = table.sigma / weight_mass;
  est.method = "kernel_increment";
  est.steps = n;
  est.h = h;
  est.hurst = table.hurst;
  est.sigma = table.sigma;
  return est;
}

double asymptotic_variance_constant(double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::domain_error(
        "asymptotic_variance_constant: hurst must lie in (0,1)");
  return 2.0 * hurst * std::tgamma(hurst + 0.5) * std::tgamma(3.0 - 2.0 * hurst) /
         std::tgamma(1.5 - hurst);
}

double normalized_stat(double theta_hat, double theta_true, double variance) {
  if (!(variance > 0.0))
    throw std::domain_error("normalized_stat: variance must be > 0");
  return (theta_hat - theta_true) / std::sqrt(variance);
}

std::vector<std::pair<int, double>> variance_rate_scan(
    double hurst, double sigma, double h, const std::vector<int>& sizes) {
  std::vector<std::pair<int, double>> rows;
  rows.reserve(sizes.size());
  for (int n : sizes) {
    Eigen::VectorXd t(n);
    for (int k = 1; k <= n; ++k) t(k - 1) = h * k;
    Eigen::MatrixXd gamma = level_covariance(n, hurst, sigma, h);
    const double quad = spd_solve(gamma, t).dot(t);
    rows.emplace_back(n, 1.0 / quad);
  }
  return rows;
}

}  // namespace mfruin

#include "mfruin/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "mfruin/pathgen.hpp"

namespace mfruin {

Eigen::MatrixXd ToeplitzCovariance::dense() const {
  const int n = size();
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = first_row(std::abs(i - j));
  return r;
}

ToeplitzCovariance increment_covariance(int n, double hurst, double sigma,
                                        double h) {
  if (n < 1) throw std::domain_error("increment_covariance: n must be >= 1");
  if (!(sigma > 0.0))
    throw std::domain_error("increment_covariance: sigma must be > 0");
  ToeplitzCovariance cov;
  cov.hurst = hurst;
  cov.sigma = sigma;
  cov.h = h;
  cov.first_row.resize(n);
  for (int k = 0; k < n; ++k)
    cov.first_row(k) = fgn_autocovariance(k, hurst, h);
  cov.first_row(0) += sigma * sigma * h;
  return cov;
}

ToeplitzCovariance build_increment_covariance(const GridSpec& grid,
                                              const ModelParams& params) {
  grid.validate();
  params.validate();
  return increment_covariance(grid.steps, params.hurst, params.sigma,
                              grid.step());
}

Eigen::MatrixXd level_covariance(int n, double hurst, double sigma, double h) {
  if (n < 1) throw std::domain_error("level_covariance: n must be >= 1");
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::domain_error("level_covariance: hurst must lie in (0,1)");
  if (!(sigma > 0.0) || !(h > 0.0))
    throw std::domain_error("level_covariance: sigma and h must be > 0");
  const double e = 2.0 * hurst;
  const double he = std::pow(h, e);
  Eigen::VectorXd pow_cache(n + 1);
  for (int i = 0; i <= n; ++i) pow_cache(i) = std::pow(double(i), e);
  Eigen::MatrixXd g(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= i; ++j) {
      const double v = sigma * sigma * h * j +
                       0.5 * he * (pow_cache(i) + pow_cache(j) -
                                   pow_cache(i - j));
      g(i - 1, j - 1) = v;
      g(j - 1, i - 1) = v;
    }
  }
  return g;
}

Eigen::MatrixXd build_level_covariance(const GridSpec& grid,
                                       const ModelParams& params) {
  grid.validate();
  params.validate();
  return level_covariance(grid.steps, params.hurst, params.sigma, grid.step());
}

}  // namespace mfruin

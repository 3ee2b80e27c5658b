#pragma once

#include <Eigen/Dense>

#include "mfruin/grid.hpp"

namespace mfruin {

// Stationary covariance of the mixed increments d_xi on a uniform grid,
// represented by its first Toeplitz row:
//   c_k = sigma^2*h*1{k=0} + fgn_autocovariance(k, H, h).
struct ToeplitzCovariance {
  Eigen::VectorXd first_row;  // c_0..c_{n-1}
  double hurst = 0.0;
  double sigma = 0.0;
  double h = 0.0;

  int size() const { return static_cast<int>(first_row.size()); }
  Eigen::MatrixXd dense() const;  // materialized matrix (tests/oracles)
};

// Low-level builders accept any H in (0,1) (the level form is needed at the
// Brownian boundary H=1/2 for rate scans); the GridSpec/ModelParams wrappers
// enforce the model's H in (1/2,1).
ToeplitzCovariance increment_covariance(int n, double hurst, double sigma,
                                        double h);
ToeplitzCovariance build_increment_covariance(const GridSpec& grid,
                                              const ModelParams& params);

// Dense covariance of the levels xi_{t_1}..xi_{t_n}:
//   Gamma_ij = sigma^2*h*min(i,j) + (h^{2H}/2)(i^{2H} + j^{2H} - |i-j|^{2H}).
// Equals L*R*L^T with L the lower-triangular cumulative-sum map and R the
// increment Toeplitz matrix.
Eigen::MatrixXd level_covariance(int n, double hurst, double sigma, double h);
Eigen::MatrixXd build_level_covariance(const GridSpec& grid,
                                       const ModelParams& params);

}  // namespace mfruin

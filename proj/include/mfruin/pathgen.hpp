#pragma once

#include <Eigen/Dense>

#include "mfruin/grid.hpp"
#include "mfruin/rng.hpp"

namespace mfruin {

// Autocovariance of fractional Gaussian noise on step h:
//   cov(B^H_{t+h}-B^H_t, B^H_{t+kh+h}-B^H_{t+kh})
//     = h^{2H} * (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) / 2.
// Valid for all H in (0,1); H = 1/2 collapses to white noise.
double fgn_autocovariance(long k, double hurst, double h);

enum class FgnMethod { circulant, dense_factor };

// Exact sampler for n consecutive fGn increments.
//
// circulant: Davies-Harte / Dietrich-Newsam embedding of the n-lag Toeplitz
// covariance into a nonnegative-definite circulant of size 2n, sampled in the
// spectral domain with one FFT per draw. Exact for all H in (0,1).
//
// dense_factor: Cholesky factor of the dense covariance; O(n^2) per draw,
// kept as an independent oracle for the circulant route.
class FgnSampler {
 public:
  FgnSampler(int n, double hurst, double h,
             FgnMethod method = FgnMethod::circulant);

  Eigen::VectorXd sample(RngStream& rng) const;

  int size() const { return n_; }
  FgnMethod method() const { return method_; }

 private:
  int n_;
  double hurst_;
  double h_;
  FgnMethod method_;
  Eigen::VectorXd spectral_scale_;  // circulant: sqrt(lambda_k / (2m)) etc.
  Eigen::MatrixXd chol_factor_;     // dense_factor: lower-triangular L
};

// One simulated realization, stored as increments; levels are derived on
// demand so the Girsanov weight stays a plain dot product on d_xi.
struct MixedPath {
  GridSpec grid;
  Eigen::VectorXd d_w;    // Brownian increments W_{t_k}-W_{t_{k-1}}
  Eigen::VectorXd d_bh;   // fGn increments
  Eigen::VectorXd d_xi;   // sigma*d_w + d_bh

  Eigen::VectorXd xi_levels() const;  // n values xi_{t_1}..xi_{t_n}
};

// Drift-free mixed path xi = sigma*W + B^H from two disjoint sub-streams of
// rng (fork 0: fGn, fork 1: Brownian).
MixedPath sample_mixed_path(const GridSpec& grid, const ModelParams& params,
                            const RngStream& rng, const FgnSampler& fgn);

// Convenience overload constructing a one-shot sampler.
MixedPath sample_mixed_path(const GridSpec& grid, const ModelParams& params,
                            const RngStream& rng,
                            FgnMethod method = FgnMethod::circulant);

// Surplus levels X_{t_0}..X_{t_n}, X_t = u + theta*t - xi_t.
Eigen::VectorXd surplus_path(const MixedPath& path, const ModelParams& params);

}  // namespace mfruin

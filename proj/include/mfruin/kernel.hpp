#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mfruin/grid.hpp"

namespace mfruin {

// Discrete fundamental-martingale weights for every horizon index.
//
// Row k solves R_k phi = sigma*h*1, the conditional-expectation analogue of
// the kernel equation; M_{t_k} = (1/sigma) * phi^(k) . d_xi[0..k) and
// <M>_{t_k} = qv_k = (h/sigma) * sum(phi^(k)).
struct KernelWeightTable {
  GridSpec grid;
  double hurst = 0.0;
  double sigma = 0.0;
  std::vector<Eigen::VectorXd> phi;  // phi[k-1] has length k
  Eigen::VectorXd qv;                // qv(k-1) = <M>_{t_k}

  int horizons() const { return static_cast<int>(phi.size()); }
  const Eigen::VectorXd& weights(int k) const { return phi.at(k - 1); }
  double quad_variation(int k) const { return qv(k - 1); }
};

// Build the full table in O(n^2) via the all-prefix Levinson solve.
// Emits a warning (stderr) if a weight escapes the sanity band
// (0, 1/sigma + 1e-6); that bound follows from sigma*g = 1 - nonnegative.
KernelWeightTable kernel_weight_table(const GridSpec& grid,
                                      const ModelParams& params);

// M value at one horizon: (1/sigma) * phi_k . d_xi_prefix.
double martingale_value(const Eigen::Ref<const Eigen::VectorXd>& phi_k,
                        const Eigen::Ref<const Eigen::VectorXd>& d_xi_prefix,
                        double sigma);

// Independent oracle: solve the continuous kernel equation
//   sigma*g(s,t) + (H(2H-1)/sigma) \int_0^t g(r,t)|r-s|^{2H-2} dr = 1
// by product integration (piecewise-linear g, weakly singular weight
// integrated exactly per subinterval). Returns g at m uniform nodes on [0,t].
Eigen::VectorXd g_nystrom(double hurst, double sigma, double t, int m);

}  // namespace mfruin

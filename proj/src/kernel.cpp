#include "mfruin/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mfruin/covariance.hpp"
#include "mfruin/errors.hpp"
#include "mfruin/linsolve.hpp"

namespace mfruin {

KernelWeightTable kernel_weight_table(const GridSpec& grid,
                                      const ModelParams& params) {
  grid.validate();
  params.validate();
  const double h = grid.step();
  const double sigma = params.sigma;

  ToeplitzCovariance cov =
      increment_covariance(grid.steps, params.hurst, sigma, h);

  KernelWeightTable table;
  table.grid = grid;
  table.hurst = params.hurst;
  table.sigma = sigma;
  table.phi = levinson_solve_all(cov, sigma * h);
  table.qv.resize(grid.steps);

  const double upper = 1.0 / sigma + 1e-6;
  bool banded = true;
  for (int k = 1; k <= grid.steps; ++k) {
    const Eigen::VectorXd& row = table.phi[k - 1];
    table.qv(k - 1) = (h / sigma) * row.sum();
    if (banded && (row.minCoeff() <= 0.0 || row.maxCoeff() >= upper))
      banded = false;
  }
  if (!banded)
    std::fprintf(stderr,
                 "kernel_weight_table: warning: weights escape the sanity "
                 "band (0, 1/sigma) at H=%g, sigma=%g, n=%d\n",
                 params.hurst, sigma, grid.steps);
  return table;
}

double martingale_value(const Eigen::Ref<const Eigen::VectorXd>& phi_k,
                        const Eigen::Ref<const Eigen::VectorXd>& d_xi_prefix,
                        double sigma) {
  if (phi_k.size() != d_xi_prefix.size())
    throw std::invalid_argument(
        "martingale_value: weight/increment length mismatch");
  return phi_k.dot(d_xi_prefix) / sigma;
}

Eigen::VectorXd g_nystrom(double hurst, double sigma, double t, int m) {
  if (!(hurst > 0.5) || !(hurst < 1.0))
    throw std::domain_error("g_nystrom: hurst must lie in (1/2, 1)");
  if (!(sigma > 0.0) || !(t > 0.0))
    throw std::domain_error("g_nystrom: sigma and t must be > 0");
  if (m < 2) throw std::domain_error("g_nystrom: need at least 2 nodes");

  const double gam = 2.0 * hurst - 2.0;  // in (-1, 0): weakly singular
  const double c_h = hurst * (2.0 * hurst - 1.0);
  const int cells = m - 1;
  const double dx = t / cells;

  // Product integration: with g piecewise linear on the cells [x_j, x_{j+1}],
  // \int g(r)|r-s|^gam dr is a linear combination of the nodal values with
  // coefficients built from the exact moments
  //   I0 = \int |r-s|^gam dr,  I1 = \int (r-p)|r-s|^gam dr
  // over each cell; both have closed-form antiderivatives.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  auto f0 = [gam](double u) {  // antiderivative of |u|^gam
    return (u >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(u), gam + 1.0) /
           (gam + 1.0);
  };
  auto f1 = [gam](double u) {  // antiderivative of u|u|^gam
    return std::pow(std::abs(u), gam + 2.0) / (gam + 2.0);
  };
  for (int i = 0; i < m; ++i) {
    const double s = i * dx;
    for (int j = 0; j < cells; ++j) {
      const double p = j * dx;
      const double q = p + dx;
      const double i0 = f0(q - s) - f0(p - s);
      const double i1 = f1(q - s) - f1(p - s) + s * i0 - p * i0;
      // g(r) = g_j*(q-r)/dx + g_{j+1}*(r-p)/dx on [p,q]
      a(i, j) += ((q - p) * i0 - i1) / dx;
      a(i, j + 1) += i1 / dx;
    }
    a.row(i) *= c_h / sigma;
    a(i, i) += sigma;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd g = lu.solve(Eigen::VectorXd::Ones(m));
  const double residual =
      (a * g - Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-8))
    throw numerical_error("g_nystrom: discretized system residual " +
                          std::to_string(residual));
  return g;
}

}  // namespace mfruin

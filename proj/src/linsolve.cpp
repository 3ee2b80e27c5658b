#include "mfruin/linsolve.hpp"

#include <cmath>

#include "mfruin/errors.hpp"

namespace mfruin {

std::vector<Eigen::VectorXd> levinson_solve_all(const ToeplitzCovariance& cov,
                                                double rhs) {
  const int n = cov.size();
  const double c0 = cov.first_row(0);
  if (!(c0 > 0.0))
    throw numerical_error("levinson_solve_all: c_0 must be positive");

  // Work on the normalized system T = R/c_0 (unit diagonal), rhs b = rhs/c_0;
  // its solutions are exactly those of R x = rhs*1.
  const double b = rhs / c0;
  Eigen::VectorXd r;
  if (n > 1) r = cov.first_row.tail(n - 1) / c0;

  std::vector<Eigen::VectorXd> solutions;
  solutions.reserve(n);

  Eigen::VectorXd x(n), y(n), v(n);
  x(0) = b;
  solutions.push_back(x.head(1));
  if (n == 1) return solutions;

  // Levinson recursion with a constant right-hand side (Golub & Van Loan,
  // Alg. 4.7.2); y carries the Durbin (Yule-Walker) solution used to extend
  // both systems by one order per step.
  y(0) = -r(0);
  double beta = 1.0;
  double alpha = -r(0);
  for (int k = 1; k < n; ++k) {
    beta *= (1.0 - alpha * alpha);
    if (!(beta > 1e-14))
      throw numerical_error(
          "levinson_solve_all: recursion breakdown (denominator " +
          std::to_string(beta) + ")");
    const double mu =
        (b - r.head(k).dot(x.head(k).reverse())) / beta;
    v.head(k) = x.head(k) + mu * y.head(k).reverse();
    x.head(k) = v.head(k);
    x(k) = mu;
    solutions.push_back(x.head(k + 1));
    if (k < n - 1) {
      alpha = -(r(k) + r.head(k).dot(y.head(k).reverse())) / beta;
      v.head(k) = y.head(k) + alpha * y.head(k).reverse();
      y.head(k) = v.head(k);
      y(k) = alpha;
    }
  }
  return solutions;
}

Eigen::VectorXd spd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw numerical_error("spd_solve: matrix not positive definite");
  return llt.solve(b);
}

}  // namespace mfruin

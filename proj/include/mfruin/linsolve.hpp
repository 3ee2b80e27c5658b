#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mfruin/covariance.hpp"

namespace mfruin {

// Solve every leading principal system R_k x = rhs*1 (k = 1..n) of a
// symmetric positive-definite Toeplitz matrix in O(n^2) total via the
// Levinson recursion. Returns n vectors, the k-th of length k.
//
// Throws numerical_error if the prediction-error denominator falls below
// 1e-14 (near-singular matrix).
std::vector<Eigen::VectorXd> levinson_solve_all(const ToeplitzCovariance& cov,
                                                double rhs);

// Dense SPD solve (Cholesky); the oracle counterpart of the Toeplitz path.
// Throws numerical_error if the factorization fails.
Eigen::VectorXd spd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b);

}  // namespace mfruin

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mfruin/covariance.hpp"
#include "mfruin/errors.hpp"
#include "mfruin/linsolve.hpp"
#include "mfruin/pathgen.hpp"
#include "mfruin/rng.hpp"

using namespace mfruin;

TEST_SUITE("gausslin") {

TEST_CASE("increment covariance first row") {
  const ToeplitzCovariance a = increment_covariance(4, 0.75, 1.0, 1.0);
  CHECK(a.first_row(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(a.first_row(1) ==
        doctest::Approx(fgn_autocovariance(1, 0.75, 1.0)).epsilon(1e-14));

  const ToeplitzCovariance b = increment_covariance(2, 0.6, 0.5, 0.25);
  CHECK(b.first_row(0) ==
        doctest::Approx(0.0625 + std::pow(0.25, 1.2)).epsilon(1e-13));
  CHECK(b.first_row(0) == doctest::Approx(0.25196).epsilon(1e-4));

  // Brownian boundary: the matrix collapses to a multiple of the identity.
  const ToeplitzCovariance w = increment_covariance(6, 0.5, 2.0, 0.1);
  CHECK(w.first_row(0) == doctest::Approx(0.5).epsilon(1e-14));
  for (int k = 1; k < 6; ++k) CHECK(std::abs(w.first_row(k)) < 1e-15);

  GridSpec grid{1.0, 8};
  ModelParams params;
  params.hurst = 0.7;
  params.sigma = 1.5;
  const ToeplitzCovariance c = build_increment_covariance(grid, params);
  CHECK(c.size() == 8);
  CHECK(c.first_row(0) ==
        doctest::Approx(2.25 * 0.125 + std::pow(0.125, 1.4)).epsilon(1e-13));
}

TEST_CASE("level covariance closed form and positivity") {
  const Eigen::MatrixXd g = level_covariance(3, 0.6, 0.5, 0.25);
  CHECK(g(0, 0) == doctest::Approx(0.0625 + std::pow(0.25, 1.2)).epsilon(1e-13));
  // Gamma_ij = sigma^2 h min(i,j) + h^{2H}(i^{2H}+j^{2H}-|i-j|^{2H})/2
  const double h2h = std::pow(0.25, 1.2);
  const double expect12 =
      0.0625 + 0.5 * h2h * (1.0 + std::pow(2.0, 1.2) - 1.0);
  CHECK(g(0, 1) == doctest::Approx(expect12).epsilon(1e-13));
  CHECK(g(1, 0) == doctest::Approx(expect12).epsilon(1e-13));

  const Eigen::MatrixXd big = level_covariance(64, 0.8, 1.0, 0.1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(big);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("levels factor through the cumulative-sum map: Gamma = L R L^T") {
  struct Case {
    int n;
    double hurst, sigma, h;
  };
  for (const Case& c : {Case{128, 0.8, 1.1, 0.05}, Case{32, 0.55, 0.3, 2.0},
                        Case{64, 0.7, 1.0, 1.0}}) {
    CAPTURE(c.hurst);
    const Eigen::MatrixXd r = increment_covariance(c.n, c.hurst, c.sigma, c.h).dense();
    const Eigen::MatrixXd gamma = level_covariance(c.n, c.hurst, c.sigma, c.h);
    const Eigen::MatrixXd l =
        Eigen::MatrixXd::Ones(c.n, c.n).triangularView<Eigen::Lower>();
    const double err = (gamma - l * r * l.transpose()).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("levinson: diagonal and scalar systems") {
  // H = 1/2 makes R diagonal, so every prefix solution is constant.
  const ToeplitzCovariance diag = increment_covariance(8, 0.5, 1.0, 0.5);
  const auto sols = levinson_solve_all(diag, 3.0);
  REQUIRE(sols.size() == 8);
  for (int k = 1; k <= 8; ++k) {
    REQUIRE(sols[k - 1].size() == k);
    for (int i = 0; i < k; ++i)
      CHECK(sols[k - 1](i) == doctest::Approx(3.0).epsilon(1e-13));
  }

  ToeplitzCovariance scalar;
  scalar.first_row = Eigen::VectorXd::Constant(1, 2.0);
  const auto one = levinson_solve_all(scalar, 1.0);
  CHECK(one[0](0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("levinson agrees with the dense factorization") {
  RngStream rng(31415u, 0u);
  const int n = 64;
  for (int draw = 0; draw < 50; ++draw) {
    const double hurst = 0.51 + 0.44 * rng.next_uniform();
    const double sigma = 0.2 + 1.8 * rng.next_uniform();
    const double h = 0.05 + 0.95 * rng.next_uniform();
    CAPTURE(draw);
    CAPTURE(hurst);

    const ToeplitzCovariance cov = increment_covariance(n, hurst, sigma, h);
    const auto sols = levinson_solve_all(cov, sigma * h);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, sigma * h);
    const Eigen::VectorXd dense = spd_solve(cov.dense(), rhs);
    const double rel = (sols.back() - dense).norm() / dense.norm();
    CHECK(rel <= 1e-8);
  }

  // A mid-table prefix must equal the dense solve on the leading block.
  const ToeplitzCovariance cov = increment_covariance(n, 0.72, 0.8, 0.2);
  const auto sols = levinson_solve_all(cov, 1.0);
  const int k = 17;
  const Eigen::MatrixXd block = cov.dense().topLeftCorner(k, k);
  const Eigen::VectorXd dense = spd_solve(block, Eigen::VectorXd::Ones(k));
  CHECK((sols[k - 1] - dense).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("levinson flags near-singular systems") {
  ToeplitzCovariance degenerate;
  degenerate.first_row = Eigen::VectorXd::Ones(4);  // rank-one matrix
  CHECK_THROWS_AS(levinson_solve_all(degenerate, 1.0), numerical_error);
}

TEST_CASE("dense SPD solve") {
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 1.0, 1.0, 2.0;
  Eigen::VectorXd b(2);
  b << 1.0, 1.0;
  const Eigen::VectorXd x = spd_solve(a, b);
  CHECK(x(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(spd_solve(indefinite, b), numerical_error);
}

}  // TEST_SUITE

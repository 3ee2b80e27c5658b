#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "mfruin/drift.hpp"
#include "mfruin/pathgen.hpp"
#include "mfruin/rng.hpp"
#include "mfruin/stats.hpp"

using namespace mfruin;

namespace {

Eigen::VectorXd drift_levels(const MixedPath& path, double theta) {
  const Eigen::VectorXd xi = path.xi_levels();
  Eigen::VectorXd y(xi.size());
  for (int k = 1; k <= xi.size(); ++k)
    y(k - 1) = theta * path.grid.time(k) - xi(k - 1);
  return y;
}

}  // namespace

TEST_SUITE("drift") {

TEST_CASE("single observation reduces to Y/t") {
  GridSpec grid{0.5, 1};
  Eigen::VectorXd y(1);
  y << 0.6;
  const DriftEstimate est = mle_discrete(y, grid, 0.75, 1.0);
  CHECK(est.value == doctest::Approx(1.2).epsilon(1e-14));
  // Var = Gamma_11 / t_1^2 = (sigma^2 h + h^{2H}) / h^2
  const double expect = (0.5 + std::pow(0.5, 1.5)) / 0.25;
  CHECK(est.variance == doctest::Approx(expect).epsilon(1e-13));
  CHECK(est.method == "discrete_level");
}

TEST_CASE("noise-free observations are recovered exactly") {
  GridSpec grid{4.0, 32};
  Eigen::VectorXd y(32);
  for (int k = 1; k <= 32; ++k) y(k - 1) = -0.7 * grid.time(k);
  const DriftEstimate est = mle_discrete(y, grid, 0.65, 0.8);
  CHECK(est.value == doctest::Approx(-0.7).epsilon(1e-12));

  ModelParams params;
  params.hurst = 0.65;
  params.sigma = 0.8;
  const KernelWeightTable table = kernel_weight_table(grid, params);
  Eigen::VectorXd dy = Eigen::VectorXd::Constant(32, -0.7 * grid.step());
  const DriftEstimate kest = mle_kernel(dy, table);
  CHECK(kest.value == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(kest.method == "kernel_increment");
}

TEST_CASE("single-step kernel estimate") {
  GridSpec grid{1.0, 1};
  ModelParams params;
  params.hurst = 0.75;
  const KernelWeightTable table = kernel_weight_table(grid, params);
  Eigen::VectorXd dy(1);
  dy << 0.6;
  const DriftEstimate est = mle_kernel(dy, table);
  CHECK(est.value == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(est.variance == doctest::Approx(2.0).epsilon(1e-14));

  // Same information as the level form.
  Eigen::VectorXd y(1);
  y << 0.6;
  const DriftEstimate lev = mle_discrete(y, grid, 0.75, 1.0);
  CHECK(est.variance == doctest::Approx(lev.variance).epsilon(1e-13));
}

TEST_CASE("level and increment estimators coincide") {
  RngStream prng(271828u, 0u);
  GridSpec grid{3.2, 64};
  for (int draw = 0; draw < 10; ++draw) {
    ModelParams params;
    params.hurst = 0.51 + 0.44 * prng.next_uniform();
    params.sigma = 0.2 + 1.8 * prng.next_uniform();
    const double theta = -2.0 + 4.0 * prng.next_uniform();
    CAPTURE(draw);
    CAPTURE(params.hurst);

    const MixedPath path = sample_mixed_path(
        grid, params, RngStream(99u, static_cast<std::uint64_t>(draw)));
    const Eigen::VectorXd y = drift_levels(path, theta);
    const Eigen::VectorXd dy =
        (theta * grid.step() - path.d_xi.array()).matrix();

    const DriftEstimate lev = mle_discrete(y, grid, params.hurst, params.sigma);
    const KernelWeightTable table = kernel_weight_table(grid, params);
    const DriftEstimate inc = mle_kernel(dy, table);

    CHECK(std::abs(inc.value - lev.value) /
              std::max(1.0, std::abs(lev.value)) <=
          1e-8);
    CHECK(std::abs(inc.variance - lev.variance) / lev.variance <= 1e-8);
  }
}

TEST_CASE("estimator is unbiased with the stated variance") {
  GridSpec grid{6.4, 64};
  ModelParams params;
  params.hurst = 0.7;
  const double theta = 1.5;
  const KernelWeightTable table = kernel_weight_table(grid, params);
  FgnSampler fgn(grid.steps, params.hurst, grid.step());

  const int reps = 5000;
  std::vector<double> estimates;
  estimates.reserve(reps);
  double exact_var = 0.0;
  for (int r = 0; r < reps; ++r) {
    const MixedPath path = sample_mixed_path(
        grid, params, RngStream(6021u, static_cast<std::uint64_t>(r)), fgn);
    const Eigen::VectorXd dy =
        (theta * grid.step() - path.d_xi.array()).matrix();
    const DriftEstimate est = mle_kernel(dy, table);
    estimates.push_back(est.value);
    exact_var = est.variance;
  }
  const SampleStats s = sample_stats(estimates);
  CHECK(std::abs(s.mean - theta) <= 3.0 * std::sqrt(exact_var / reps));
  CHECK(std::abs(s.variance - exact_var) / exact_var <= 0.10);
}

TEST_CASE("asymptotic variance constant") {
  CHECK(asymptotic_variance_constant(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(asymptotic_variance_constant(0.7) - 0.9865) <= 5e-4);
  CHECK(std::abs(asymptotic_variance_constant(0.75) - 0.9833) <= 5e-4);
  CHECK_THROWS_AS(asymptotic_variance_constant(1.0), std::domain_error);
}

TEST_CASE("normalized statistic") {
  CHECK(normalized_stat(1.3, 1.2, 0.04) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS(normalized_stat(1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("variance decay rates") {
  const std::vector<int> sizes{32, 64, 128, 256, 512};

  auto slope_of = [&](double hurst, double sigma) {
    const auto rows = variance_rate_scan(hurst, sigma, 1.0, sizes);
    std::vector<double> lx, ly;
    for (const auto& [n, v] : rows) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(v));
    }
    return ols_slope(lx, ly);
  };

  // Brownian boundary: exact N^{-1} decay.
  CHECK(std::abs(slope_of(0.5, 1.3) + 1.0) <= 0.01);
  // Mixed model: N^{2H-2} decay dominated by the fractional component.
  CHECK(std::abs(slope_of(0.6, 1.0) - (-0.8)) <= 0.15);
  CHECK(std::abs(slope_of(0.75, 1.0) - (-0.5)) <= 0.15);

  // Variance is monotone decreasing in the sample size.
  const auto rows = variance_rate_scan(0.7, 1.0, 1.0, sizes);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].second < rows[i - 1].second);
}

TEST_CASE("argument validation") {
  GridSpec grid{1.0, 4};
  Eigen::VectorXd y(3);
  y << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(mle_discrete(y, grid, 0.7, 1.0), std::invalid_argument);

  ModelParams params;
  params.hurst = 0.7;
  const KernelWeightTable table = kernel_weight_table(grid, params);
  CHECK_THROWS_AS(mle_kernel(y, table), std::invalid_argument);
}

}  // TEST_SUITE

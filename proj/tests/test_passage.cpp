#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mfruin/errors.hpp"
#include "mfruin/passage.hpp"
#include "mfruin/rng.hpp"

using namespace mfruin;

TEST_SUITE("passage") {

TEST_CASE("ln integral: frozen values and divergence guard") {
  CHECK(ln_integral(4.0, 0.6, 1.0, 2) ==
        doctest::Approx(20.88586126442637).epsilon(1e-5));
  CHECK(ln_integral(50.0, 0.6, 1.0, 2) ==
        doctest::Approx(185.7802452085852).epsilon(1e-5));

  CHECK_THROWS_AS(ln_integral(4.0, 0.6, 0.0, 2), numerical_error);
  CHECK_THROWS_AS(ln_integral(4.0, 0.6, -1.0, 2), numerical_error);
  CHECK_THROWS_AS(ln_integral(0.0, 0.6, 1.0, 2), std::domain_error);
  CHECK_THROWS_AS(ln_integral(4.0, 2.5, 1.0, 2), std::domain_error);
  CHECK_THROWS_AS(ln_integral(4.0, 0.6, 1.0, 0), std::domain_error);
}

TEST_CASE("ln integral obeys the scaling identity") {
  // L_n(u, H, a) = (u/a)^{n-H} L_n(c, H, c), c = u^{1-H} a^H.
  RngStream rng(140u, 0u);
  for (int draw = 0; draw < 10; ++draw) {
    const int n = 1 + static_cast<int>(3.0 * rng.next_uniform() * 0.999);
    const double hurst = 0.3 + 0.6 * rng.next_uniform();
    const double u = 1.0 + 59.0 * rng.next_uniform();
    const double a = 0.3 + 2.7 * rng.next_uniform();
    CAPTURE(draw);
    CAPTURE(n);
    CAPTURE(hurst);

    const double c = std::pow(u, 1.0 - hurst) * std::pow(a, hurst);
    const double lhs = ln_integral(u, hurst, a, n);
    const double rhs =
        std::pow(u / a, n - hurst) * ln_integral(c, hurst, c, n);
    CHECK(std::abs(lhs - rhs) / rhs <= 1e-5);
  }
}

TEST_CASE("ln integral approaches its large-u asymptote") {
  // L_n ~ sqrt(2 pi) (n - H) u^{n-1} / a^n as u -> infinity.
  const double value = ln_integral(50.0, 0.6, 1.0, 2);
  const double asym = std::sqrt(2.0 * M_PI) * (2.0 - 0.6) * 50.0;
  const double ratio = value / asym;
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  CHECK(ratio == doctest::Approx(1.0588).epsilon(1e-3));
}

TEST_CASE("moment bound: frozen value and barrier dominance") {
  const double b1 = moment_upper_bound(10.0, 2.0, 0.7, 1);
  CHECK(b1 == doctest::Approx(5.429006488).epsilon(1e-6));
  CHECK(b1 >= 10.0 / 2.0);  // bound can never undercut the drift-only time

  const double b2 = moment_upper_bound(10.0, 2.0, 0.7, 2);
  CHECK(b2 >= 25.0);

  // Relative slack shrinks toward 1 as the barrier grows.
  const double r10 = moment_upper_bound(10.0, 2.0, 0.7, 1) / 5.0;
  const double r50 = moment_upper_bound(50.0, 2.0, 0.7, 1) / 25.0;
  const double r100 = moment_upper_bound(100.0, 2.0, 0.7, 1) / 50.0;
  CHECK(r10 > 1.0);
  CHECK(r50 > 1.0);
  CHECK(r100 > 1.0);
  CHECK(r50 < r10);
  CHECK(r100 < r50);

  CHECK_THROWS_AS(moment_upper_bound(-1.0, 2.0, 0.7, 1), std::domain_error);
  CHECK_THROWS_AS(moment_upper_bound(10.0, 2.0, 0.5, 1), std::domain_error);
  CHECK_THROWS_AS(moment_upper_bound(10.0, 2.0, 0.7, 0), std::domain_error);
}

TEST_CASE("query validation happens before any simulation") {
  PassageQuery q;
  q.grid = GridSpec{15.0, 300};

  PassageQuery bad = q;
  bad.tilt = 0.0;
  CHECK_THROWS_AS(passage_moment_mc(bad), std::domain_error);
  bad = q;
  bad.barrier = -1.0;
  CHECK_THROWS_AS(passage_moment_mc(bad), std::domain_error);
  bad = q;
  bad.moment_order = 0;
  CHECK_THROWS_AS(passage_moment_mc(bad), std::domain_error);
  bad = q;
  bad.hurst = 0.5;
  CHECK_THROWS_AS(passage_moment_mc(bad), std::domain_error);
  bad = q;
  bad.n_paths = 0;
  CHECK_THROWS_AS(passage_moment_mc(bad), std::domain_error);
}

TEST_CASE("first moment concentrates at v/a") {
  PassageQuery q;
  q.barrier = 10.0;
  q.tilt = 2.0;
  q.moment_order = 1;
  q.hurst = 0.7;
  q.sigma = 1.0;
  q.grid = GridSpec{15.0, 300};
  q.n_paths = 500;
  q.seed = 99u;

  const PassageMoments m = passage_moment_mc(q);
  CHECK(m.non_crossing_fraction <= 0.01);
  const double ratio = m.moment * q.tilt / q.barrier;
  CHECK(ratio >= 0.85);
  CHECK(ratio <= 1.15);
  CHECK(m.std_err > 0.0);
  CHECK(m.moment <=
        moment_upper_bound(q.barrier, q.tilt, q.hurst, 1) + 3.0 * m.std_err);

  // Second moment dominates the squared first moment (Jensen).
  PassageQuery q2 = q;
  q2.moment_order = 2;
  const PassageMoments m2 = passage_moment_mc(q2);
  CHECK(m2.moment + 3.0 * m2.std_err >= m.moment * m.moment);
}

TEST_CASE("ratio test is insensitive to the diffusion scale") {
  for (double sigma : {0.5, 2.0}) {
    CAPTURE(sigma);
    PassageQuery q;
    q.barrier = 50.0;
    q.tilt = 2.0;
    q.moment_order = 1;
    q.hurst = 0.7;
    q.sigma = sigma;
    q.grid = GridSpec{75.0, 750};
    q.n_paths = 400;
    q.seed = 1234u;
    const PassageMoments m = passage_moment_mc(q);
    const double ratio = m.moment * q.tilt / q.barrier;
    CHECK(ratio >= 0.85);
    CHECK(ratio <= 1.15);
  }
}

}  // TEST_SUITE

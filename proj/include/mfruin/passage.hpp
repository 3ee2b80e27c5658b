#pragma once

#include <cstdint>

#include "mfruin/grid.hpp"

namespace mfruin {

// First-passage moment query for eta_a(v) = inf{t : xi_t + a*t > v}.
struct PassageQuery {
  double barrier = 10.0;     // v > 0
  double tilt = 1.0;         // a > 0
  int moment_order = 1;      // n >= 1
  double hurst = 0.7;
  double sigma = 1.0;
  GridSpec grid;             // horizon should cover several v/a
  long n_paths = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream_offset = 0;
  int threads = 0;

  void validate() const;
};

// L_n(u, H, a) = int_0^inf exp{-(u t^{-H/(n-H)} - a t^{(1-H)/(n-H)})^2 / 2} dt,
// evaluated to ~1e-6 relative accuracy after the substitution t = e^s
// (integrand becomes smooth and unimodal with Gaussian-type tails).
// Throws numerical_error for a <= 0 (the integral diverges at a = 0).
double ln_integral(double u, double hurst_param, double a, int n);

// Upper bound on E eta_a^n(v) for sigma = 1 with H' = (2H+1)/4:
//  ( vH'/(sqrt2 (n-H')) L_n(v/sqrt2, H', a/sqrt2)
//   + (1-H')a/(sqrt2 (n+1-H')) L_{n+1}(v/sqrt2, H', a/sqrt2) ) / sqrt(2 pi).
double moment_upper_bound(double v, double a, double hurst, int n);

struct PassageMoments {
  double moment = 0.0;                // mean of eta^n over crossing paths
  double std_err = 0.0;
  double non_crossing_fraction = 0.0; // bias diagnostic; warning above 1%
  long n_paths = 0;
};

// Monte Carlo first-passage moment on the discretized drift-free mixed path.
PassageMoments passage_moment_mc(const PassageQuery& query);

}  // namespace mfruin

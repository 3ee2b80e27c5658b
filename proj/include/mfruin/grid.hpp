#pragma once

#include <cmath>
#include <stdexcept>

namespace mfruin {

// Uniform time grid t_k = k*h, k = 0..n, shared by every path-indexed object.
struct GridSpec {
  double horizon = 1.0;  // T
  int steps = 1;         // n

  double step() const { return horizon / steps; }
  double time(int k) const { return step() * k; }

  void validate() const {
    if (steps < 1) throw std::domain_error("GridSpec: steps must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw std::domain_error("GridSpec: horizon must be positive and finite");
  }
};

// Model parameters of the surplus X_t = u + theta*t - (sigma*W_t + B^H_t).
struct ModelParams {
  double hurst = 0.75;  // H in (1/2, 1)
  double sigma = 1.0;   // diffusion scale > 0
  double drift = 0.0;   // premium drift theta
  double initial = 0.0; // initial reserve u >= 0

  void validate() const {
    if (!(hurst > 0.5) || !(hurst < 1.0))
      throw std::domain_error("ModelParams: hurst must lie in (1/2, 1)");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::domain_error("ModelParams: sigma must be positive");
    if (!std::isfinite(drift))
      throw std::domain_error("ModelParams: drift must be finite");
    if (!(initial >= 0.0) || !std::isfinite(initial))
      throw std::domain_error("ModelParams: initial reserve must be >= 0");
  }
};

}  // namespace mfruin

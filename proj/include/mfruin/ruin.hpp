#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfruin/drift.hpp"
#include "mfruin/grid.hpp"
#include "mfruin/kernel.hpp"
#include "mfruin/pathgen.hpp"

namespace mfruin {

struct RuinConfig {
  ModelParams params;  // initial reserve u, drift theta, sigma, hurst
  GridSpec grid;       // horizon T (T_max in ultimate mode) and steps n
  double tilt = 1.0;   // Girsanov tilt a
  bool ultimate = false;
  long n_paths = 10000;
  std::uint64_t seed = 0;
  std::uint64_t stream_offset = 0;  // reserve disjoint stream blocks per stage
  int threads = 0;

  void validate() const;
};

struct RuinEstimate {
  std::string method;  // "crude" | "girsanov" | "ultimate"
  double psi_hat = 0.0;
  double std_err = 0.0;
  long n_paths = 0;
  double truncated_fraction = 0.0;  // ultimate mode: paths beyond T_max
  bool has_sensitivity = false;
  double d_psi_d_theta = 0.0;
  double d_psi_std_err = 0.0;
};

// Optional per-path trace (crossing_index = -1 when no grid crossing).
struct PathRecord {
  long path_id = 0;
  int crossing_index = -1;
  double eta = 0.0;
  double weight = 0.0;
};

// First grid index k in [1, n] with xi_{t_k} + tilt*t_k > barrier (strict),
// given the increments of a drift-free path.
std::optional<int> first_passage_index(
    const Eigen::Ref<const Eigen::VectorXd>& d_xi, const GridSpec& grid,
    double tilt, double barrier);
std::optional<int> first_passage_index(const MixedPath& path, double tilt,
                                       double barrier);

// Fraction of simulated surplus paths with min_k X_{t_k} < 0.
RuinEstimate crude_ruin_mc(const RuinConfig& config,
                           std::vector<PathRecord>* records = nullptr);

// Girsanov estimator on drift-free paths: a path crossing
// xi_t + a*t > u at grid index k contributes
//   exp(-(a+theta)*M_{t_k} - (a+theta)^2/2 * qv_k),
// non-crossing paths contribute 0. The pathwise theta-derivative
//   (-M_{t_k} - (a+theta)*qv_k) * weight
// is accumulated alongside (finite-horizon mode only).
RuinEstimate girsanov_ruin_mc(const RuinConfig& config,
                              const KernelWeightTable& table,
                              std::vector<PathRecord>* records = nullptr);

// Same contribution rule with the horizon indicator dropped; requires a > 0.
// Paths not crossing by T_max contribute 0 and are counted in
// truncated_fraction (reported; warning above 1%).
RuinEstimate ultimate_ruin_mc(const RuinConfig& config,
                              const KernelWeightTable& table,
                              std::vector<PathRecord>* records = nullptr);

// d psi / d theta with its Monte Carlo standard error.
RuinEstimate ruin_sensitivity(const RuinConfig& config,
                              const KernelWeightTable& table);

struct PluginRuinCi {
  DriftEstimate theta;  // estimated from the observation window
  RuinEstimate psi;     // Girsanov run at theta_hat, with sensitivity
  double ci_low = 0.0;  // delta-method CI for the estimation error;
  double ci_high = 0.0; // Monte Carlo error reported separately in psi
  double z = 0.0;
};

// Plug-in workflow: estimate theta from observed drift levels
// Y_{t_1..t_n'} = theta*t - xi_t on the observation grid, re-run the Girsanov
// estimator at theta_hat, and wrap it in the delta-method interval
//   psi_hat -/+ z_{0.975} * |d psi/d theta| * sd(theta_hat).
PluginRuinCi plugin_ruin_ci(
    const Eigen::Ref<const Eigen::VectorXd>& observed_levels,
    const GridSpec& observation_grid, const RuinConfig& eval_config);

}  // namespace mfruin

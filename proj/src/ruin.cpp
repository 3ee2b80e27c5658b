#include "mfruin/ruin.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mfruin/parallel.hpp"
#include "mfruin/stats.hpp"

namespace mfruin {

void RuinConfig::validate() const {
  grid.validate();
  params.validate();
  if (!(params.initial > 0.0))
    throw std::domain_error("RuinConfig: initial reserve u must be > 0");
  if (n_paths < 1) throw std::domain_error("RuinConfig: n_paths must be >= 1");
  if (!std::isfinite(tilt)) throw std::domain_error("RuinConfig: tilt not finite");
  if (ultimate && !(tilt > 0.0))
    throw std::domain_error("RuinConfig: ultimate mode needs tilt a > 0");
}

std::optional<int> first_passage_index(
    const Eigen::Ref<const Eigen::VectorXd>& d_xi, const GridSpec& grid,
    double tilt, double barrier) {
  if (!(barrier > 0.0))
    throw std::domain_error("first_passage_index: barrier must be > 0");
  const double h = grid.step();
  double xi = 0.0;
  for (Eigen::Index k = 1; k <= d_xi.size(); ++k) {
    xi += d_xi(k - 1);
    if (xi + tilt * h * static_cast<double>(k) > barrier)
      return static_cast<int>(k);
  }
  return std::nullopt;
}

std::optional<int> first_passage_index(const MixedPath& path, double tilt,
                                       double barrier) {
  return first_passage_index(path.d_xi, path.grid, tilt, barrier);
}

namespace {

struct McAccumulator {
  std::vector<double> weights;   // per-path contribution, 0 if no crossing
  std::vector<double> sens;      // per-path derivative contribution
  std::vector<char> crossed;     // crossing indicator
};

// Shared path loop for all three estimators. Paths are drift-free; the
// estimators differ only in barrier drift, weight rule and indicator.
McAccumulator run_paths(const RuinConfig& config, const KernelWeightTable* table,
                        bool ultimate, std::vector<PathRecord>* records) {
  const long n_paths = config.n_paths;
  const GridSpec& grid = config.grid;
  const double sigma = config.params.sigma;
  const double u = config.params.initial;
  const double c = config.tilt + config.params.drift;  // a + theta
  const bool crude = (table == nullptr);
  // Crude mode monitors the surplus itself: X < 0 iff xi - theta*t > u.
  const double barrier_tilt = crude ? -config.params.drift : config.tilt;

  const FgnSampler sampler(grid.steps, config.params.hurst, grid.step());

  McAccumulator acc;
  acc.weights.assign(n_paths, 0.0);
  acc.sens.assign(n_paths, 0.0);
  acc.crossed.assign(n_paths, 0);
  if (records) records->assign(n_paths, PathRecord{});

  parallel_for(n_paths, config.threads, [&](long begin, long end) {
    for (long p = begin; p < end; ++p) {
      RngStream rng(config.seed, config.stream_offset + p);
      MixedPath path = sample_mixed_path(grid, config.params, rng, sampler);
      const auto k = first_passage_index(path.d_xi, grid, barrier_tilt, u);
      double weight = 0.0, sens = 0.0, eta = 0.0;
      if (k) {
        acc.crossed[p] = 1;
        eta = grid.time(*k);
        if (crude) {
          weight = 1.0;
        } else {
          const double m = martingale_value(table->weights(*k),
                                            path.d_xi.head(*k), sigma);
          const double qv = table->quad_variation(*k);
          weight = std::exp(-c * m - 0.5 * c * c * qv);
          sens = (-m - c * qv) * weight;
        }
        acc.weights[p] = weight;
        acc.sens[p] = sens;
      }
      if (records)
        (*records)[p] = PathRecord{p, k ? *k : -1, k ? eta : 0.0, weight};
    }
  });
  (void)ultimate;  // same loop; the indicator choice is the horizon itself
  return acc;
}

RuinEstimate summarize(const McAccumulator& acc, const std::string& method,
                       bool with_sensitivity) {
  RuinEstimate est;
  est.method = method;
  est.n_paths = static_cast<long>(acc.weights.size());
  SampleStats w = sample_stats(acc.weights);
  est.psi_hat = w.mean;
  est.std_err = w.std_err;
  long crossings = 0;
  for (char c : acc.crossed) crossings += c;
  est.truncated_fraction =
      1.0 - static_cast<double>(crossings) / static_cast<double>(est.n_paths);
  if (with_sensitivity) {
    SampleStats s = sample_stats(acc.sens);
    est.has_sensitivity = true;
    est.d_psi_d_theta = s.mean;
    est.d_psi_std_err = s.std_err;
  }
  return est;
}

}  // namespace

RuinEstimate crude_ruin_mc(const RuinConfig& config,
                           std::vector<PathRecord>* records) {
  config.validate();
  if (config.ultimate)
    throw std::domain_error("crude_ruin_mc: requires a finite horizon");
  McAccumulator acc = run_paths(config, nullptr, false, records);
  RuinEstimate est = summarize(acc, "crude", false);
  // Binomial error for the indicator estimator.
  const double p = est.psi_hat;
  est.std_err = std::sqrt(p * (1.0 - p) / static_cast<double>(est.n_paths));
  est.truncated_fraction = 0.0;
  return est;
}

RuinEstimate girsanov_ruin_mc(const RuinConfig& config,
                              const KernelWeightTable& table,
                              std::vector<PathRecord>* records) {
  config.validate();
  if (table.horizons() != config.grid.steps)
    throw std::invalid_argument("girsanov_ruin_mc: table/grid size mismatch");
  McAccumulator acc = run_paths(config, &table, false, records);
  RuinEstimate est = summarize(acc, "girsanov", true);
  est.truncated_fraction = 0.0;
  return est;
}

RuinEstimate ultimate_ruin_mc(const RuinConfig& config,
                              const KernelWeightTable& table,
                              std::vector<PathRecord>* records) {
  RuinConfig cfg = config;
  cfg.ultimate = true;
  cfg.validate();
  if (table.horizons() != cfg.grid.steps)
    throw std::invalid_argument("ultimate_ruin_mc: table/grid size mismatch");
  McAccumulator acc = run_paths(cfg, &table, true, records);
  RuinEstimate est = summarize(acc, "ultimate", false);
  if (est.truncated_fraction > 0.01)
    std::fprintf(stderr,
                 "ultimate_ruin_mc: warning: %.2f%% of paths did not cross by "
                 "T_max=%g; psi_hat is biased low\n",
                 100.0 * est.truncated_fraction, cfg.grid.horizon);
  return est;
}

RuinEstimate ruin_sensitivity(const RuinConfig& config,
                              const KernelWeightTable& table) {
  return girsanov_ruin_mc(config, table);
}

PluginRuinCi plugin_ruin_ci(
    const Eigen::Ref<const Eigen::VectorXd>& observed_levels,
    const GridSpec& observation_grid, const RuinConfig& eval_config) {
  observation_grid.validate();
  if (observed_levels.size() != observation_grid.steps)
    throw std::invalid_argument(
        "plugin_ruin_ci: expected one observed level per grid step");

  ModelParams obs_params = eval_config.params;
  obs_params.drift = 0.0;  // estimated below, not assumed
  KernelWeightTable obs_table = kernel_weight_table(observation_grid, obs_params);

  Eigen::VectorXd d_y(observation_grid.steps);
  double prev = 0.0;
  for (int k = 0; k < observation_grid.steps; ++k) {
    d_y(k) = observed_levels(k) - prev;
    prev = observed_levels(k);
  }

  PluginRuinCi out;
  out.theta = mle_kernel(d_y, obs_table);

  RuinConfig run = eval_config;
  run.params.drift = out.theta.value;
  run.validate();
  KernelWeightTable eval_table = kernel_weight_table(run.grid, run.params);
  out.psi = girsanov_ruin_mc(run, eval_table);

  out.z = normal_quantile(0.975);
  const double half_width =
      out.z * std::abs(out.psi.d_psi_d_theta) * std::sqrt(out.theta.variance);
  out.ci_low = out.psi.psi_hat - half_width;
  out.ci_high = out.psi.psi_hat + half_width;
  return out;
}

}  // namespace mfruin

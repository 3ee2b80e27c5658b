#include "mfruin/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfruin/covariance.hpp"
#include "mfruin/drift.hpp"
#include "mfruin/errors.hpp"
#include "mfruin/io.hpp"
#include "mfruin/kernel.hpp"
#include "mfruin/parallel.hpp"
#include "mfruin/passage.hpp"
#include "mfruin/pathgen.hpp"
#include "mfruin/ruin.hpp"
#include "mfruin/stats.hpp"

namespace mfruin {

namespace fs = std::filesystem;

std::filesystem::path RunContext::emit(const std::string& name) const {
  fs::path p = out_dir / name;
  if (outputs) outputs->push_back(p);
  return p;
}

// --- config plumbing --------------------------------------------------------

void check_keys(const Json& j, const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw config_error("unknown config key \"" + it.key() + "\"");
  }
}

static const Json* find_key(const Json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double require_number(const Json& j, const std::string& key) {
  const Json* v = find_key(j, key);
  if (!v) throw config_error("missing required key \"" + key + "\"");
  if (!v->is_number())
    throw config_error("key \"" + key + "\" must be a number");
  return v->get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback) {
  const Json* v = find_key(j, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw config_error("key \"" + key + "\" must be a number");
  return v->get<double>();
}

long require_integer(const Json& j, const std::string& key) {
  const double d = require_number(j, key);
  const long l = std::lround(d);
  if (static_cast<double>(l) != d)
    throw config_error("key \"" + key + "\" must be an integer");
  return l;
}

long integer_or(const Json& j, const std::string& key, long fallback) {
  if (!find_key(j, key)) return fallback;
  return require_integer(j, key);
}

std::string string_or(const Json& j, const std::string& key,
                      const std::string& fallback) {
  const Json* v = find_key(j, key);
  if (!v) return fallback;
  if (!v->is_string())
    throw config_error("key \"" + key + "\" must be a string");
  return v->get<std::string>();
}

std::vector<double> number_list_or(const Json& j, const std::string& key,
                                   const std::vector<double>& fallback) {
  const Json* v = find_key(j, key);
  if (!v) return fallback;
  if (!v->is_array())
    throw config_error("key \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number())
      throw config_error("key \"" + key + "\" must be an array of numbers");
    out.push_back(e.get<double>());
  }
  if (out.empty()) throw config_error("key \"" + key + "\" must be nonempty");
  return out;
}

void write_json_atomic(const fs::path& path, const Json& value) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << value.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

namespace {

// Global keys accepted alongside any task/experiment settings.
std::vector<std::string> with_globals(std::vector<std::string> keys) {
  for (const char* g : {"experiment", "task", "seed", "threads", "out_dir"})
    keys.emplace_back(g);
  return keys;
}

GridSpec grid_from(const Json& j) {
  GridSpec grid;
  grid.horizon = require_number(j, "horizon");
  grid.steps = static_cast<int>(require_integer(j, "steps"));
  grid.validate();
  return grid;
}

ModelParams model_from(const Json& j, bool need_u, bool need_drift) {
  ModelParams params;
  params.hurst = require_number(j, "hurst");
  params.sigma = require_number(j, "sigma");
  params.drift = need_drift ? require_number(j, "drift")
                            : number_or(j, "drift", 0.0);
  params.initial = need_u ? require_number(j, "u") : number_or(j, "u", 0.0);
  params.validate();
  return params;
}

Json estimate_to_json(const DriftEstimate& e, std::uint64_t seed) {
  Json out;
  out["method"] = e.method;
  out["theta_hat"] = e.value;
  out["variance"] = e.variance;
  out["n"] = e.steps;
  out["h"] = e.h;
  out["H"] = e.hurst;
  out["sigma"] = e.sigma;
  out["seed"] = seed;
  return out;
}

Json ruin_to_json(const RuinEstimate& e, const RuinConfig& cfg) {
  Json out;
  out["method"] = e.method;
  out["psi_hat"] = e.psi_hat;
  out["std_err"] = e.std_err;
  out["n_paths"] = e.n_paths;
  out["truncated_fraction"] = e.truncated_fraction;
  out["a"] = cfg.tilt;
  out["u"] = cfg.params.initial;
  out["theta"] = cfg.params.drift;
  out["sigma"] = cfg.params.sigma;
  out["hurst"] = cfg.params.hurst;
  out["T"] = cfg.grid.horizon;
  out["n"] = cfg.grid.steps;
  out["seed"] = cfg.seed;
  if (e.has_sensitivity) {
    out["d_psi_d_theta"] = e.d_psi_d_theta;
    out["d_psi_std_err"] = e.d_psi_std_err;
  } else {
    out["d_psi_d_theta"] = nullptr;
  }
  return out;
}

void write_path_records_csv(const fs::path& path,
                            const std::vector<PathRecord>& records) {
  CsvWriter csv(path, {"path_id", "crossing_index", "eta", "weight"});
  for (const auto& r : records) {
    std::string line = std::to_string(r.path_id) + ',' +
                       std::to_string(r.crossing_index) + ',' +
                       CsvWriter::format(r.eta) + ',' +
                       CsvWriter::format(r.weight);
    csv.write_raw_row(line);
  }
}

}  // namespace

// --- single tasks -----------------------------------------------------------

Json task_simulate(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"hurst", "sigma", "drift", "u", "horizon",
                                     "steps", "paths", "method"}));
  const GridSpec grid = grid_from(settings);
  const ModelParams params = model_from(settings, false, false);
  const long paths = integer_or(settings, "paths", 1);
  if (paths < 1) throw config_error("key \"paths\" must be >= 1");
  const std::string method_name = string_or(settings, "method", "circulant");
  FgnMethod method;
  if (method_name == "circulant")
    method = FgnMethod::circulant;
  else if (method_name == "dense_factor")
    method = FgnMethod::dense_factor;
  else
    throw config_error("key \"method\" must be circulant or dense_factor");

  const FgnSampler sampler(grid.steps, params.hurst, grid.step(), method);
  Json files = Json::array();
  for (long p = 0; p < paths; ++p) {
    RngStream rng(ctx.seed, static_cast<std::uint64_t>(p));
    MixedPath path = sample_mixed_path(grid, params, rng, sampler);
    Eigen::VectorXd x = surplus_path(path, params);
    const std::string name = "path_" + std::to_string(p) + ".csv";
    CsvWriter csv(ctx.emit(name), {"t", "dW", "dBH", "dXi", "X"});
    for (int k = 1; k <= grid.steps; ++k)
      csv.write_row({grid.time(k), path.d_w(k - 1), path.d_bh(k - 1),
                     path.d_xi(k - 1), x(k)});
    files.push_back(name);
  }

  Json summary;
  summary["task"] = "simulate";
  summary["paths"] = paths;
  summary["method"] = method_name;
  summary["files"] = files;
  summary["var_xi_horizon_theory"] =
      params.sigma * params.sigma * grid.horizon +
      std::pow(grid.horizon, 2.0 * params.hurst);
  return summary;
}

Json task_kernel(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"hurst", "sigma", "horizon", "steps",
                                     "full_table", "nystrom_nodes"}));
  const GridSpec grid = grid_from(settings);
  const ModelParams params = model_from(settings, false, false);
  const bool full = settings.value("full_table", false);

  KernelWeightTable table = kernel_weight_table(grid, params);
  {
    CsvWriter csv(ctx.emit("kernel_phi.csv"), {"k", "i", "phi"});
    const int k_lo = full ? 1 : grid.steps;
    for (int k = k_lo; k <= grid.steps; ++k) {
      const Eigen::VectorXd& row = table.weights(k);
      for (int i = 1; i <= k; ++i)
        csv.write_raw_row(std::to_string(k) + ',' + std::to_string(i) + ',' +
                          CsvWriter::format(row(i - 1)));
    }
  }
  {
    CsvWriter csv(ctx.emit("kernel_qv.csv"), {"k", "qv"});
    for (int k = 1; k <= grid.steps; ++k)
      csv.write_raw_row(std::to_string(k) + ',' +
                        CsvWriter::format(table.quad_variation(k)));
  }

  Json summary;
  summary["task"] = "kernel";
  summary["qv_final"] = table.quad_variation(grid.steps);
  summary["phi_sum_final"] = table.weights(grid.steps).sum();

  if (find_key(settings, "nystrom_nodes")) {
    const int m = static_cast<int>(require_integer(settings, "nystrom_nodes"));
    Eigen::VectorXd g = g_nystrom(params.hurst, params.sigma, grid.horizon, m);
    CsvWriter csv(ctx.emit("nystrom_g.csv"), {"s", "g"});
    const double dx = grid.horizon / (m - 1);
    for (int i = 0; i < m; ++i) csv.write_row({i * dx, g(i)});
    // Compare phi (midpoint values of g) against the interpolated solver.
    const Eigen::VectorXd& phi = table.weights(grid.steps);
    const double g_max = g.maxCoeff();
    double worst = 0.0;
    for (int i = 0; i < grid.steps; ++i) {
      const double mid = (i + 0.5) * grid.step();
      const double pos = mid / dx;
      const int cell = std::min(static_cast<int>(pos), m - 2);
      const double w = pos - cell;
      const double g_mid = (1.0 - w) * g(cell) + w * g(cell + 1);
      worst = std::max(worst, std::abs(phi(i) - g_mid) / g_max);
    }
    summary["nystrom_nodes"] = m;
    summary["nystrom_max_rel_dev"] = worst;
  }
  return summary;
}

namespace {

Eigen::VectorXd read_levels_csv(const fs::path& file, double u) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open input file " + file.string());
  std::string line;
  if (!std::getline(in, line))
    throw config_error("input file " + file.string() + " is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  int level_col = -1;
  bool is_surplus = false;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "Y") level_col = static_cast<int>(i);
  }
  if (level_col < 0) {
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == "X") {
        level_col = static_cast<int>(i);
        is_surplus = true;
      }
  }
  if (level_col < 0)
    throw config_error("input CSV needs a \"Y\" or \"X\" column");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    double v = 0.0;
    bool found = false;
    while (std::getline(ss, tok, ',')) {
      if (col == level_col) {
        v = std::stod(tok);
        found = true;
      }
      ++col;
    }
    if (!found)
      throw config_error("malformed row in input CSV: \"" + line + "\"");
    values.push_back(is_surplus ? v - u : v);
  }
  if (values.empty()) throw config_error("input CSV has no data rows");
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<long>(values.size()));
}

}  // namespace

Json task_estimate_drift(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"hurst", "sigma", "drift", "u", "horizon",
                                     "steps", "input"}));
  const GridSpec grid = grid_from(settings);
  const bool simulated = !find_key(settings, "input");
  const ModelParams params = model_from(settings, false, simulated);

  Eigen::VectorXd levels;
  if (simulated) {
    RngStream rng(ctx.seed, 0);
    MixedPath path = sample_mixed_path(grid, params, rng);
    Eigen::VectorXd xi = path.xi_levels();
    levels.resize(grid.steps);
    for (int k = 1; k <= grid.steps; ++k)
      levels(k - 1) = params.drift * grid.time(k) - xi(k - 1);
  } else {
    levels = read_levels_csv(string_or(settings, "input", ""),
                             number_or(settings, "u", 0.0));
    if (levels.size() != grid.steps)
      throw config_error("input has " + std::to_string(levels.size()) +
                         " rows but \"steps\" is " +
                         std::to_string(grid.steps));
  }

  DriftEstimate discrete =
      mle_discrete(levels, grid, params.hurst, params.sigma);
  KernelWeightTable table = kernel_weight_table(grid, params);
  Eigen::VectorXd d_y(grid.steps);
  double prev = 0.0;
  for (int k = 0; k < grid.steps; ++k) {
    d_y(k) = levels(k) - prev;
    prev = levels(k);
  }
  DriftEstimate kernel = mle_kernel(d_y, table);

  Json report = Json::array();
  report.push_back(estimate_to_json(discrete, ctx.seed));
  report.push_back(estimate_to_json(kernel, ctx.seed));
  write_json_atomic(ctx.emit("drift_estimate.json"), report);

  Json summary;
  summary["task"] = "estimate-drift";
  summary["theta_hat_discrete"] = discrete.value;
  summary["theta_hat_kernel"] = kernel.value;
  summary["variance"] = kernel.variance;
  summary["relative_difference"] =
      std::abs(discrete.value - kernel.value) /
      std::max(1e-300, std::abs(discrete.value));
  if (simulated) {
    summary["true_drift"] = params.drift;
    summary["normalized_stat"] =
        normalized_stat(kernel.value, params.drift, kernel.variance);
  }
  return summary;
}

Json task_ruin(const Json& settings, const RunContext& ctx) {
  check_keys(settings,
             with_globals({"u", "drift", "sigma", "hurst", "horizon", "steps",
                           "method", "tilt", "n_mc", "t_max", "paths_csv"}));
  const std::string method = string_or(settings, "method", "girsanov");
  if (method != "crude" && method != "girsanov" && method != "ultimate")
    throw config_error("key \"method\" must be crude, girsanov or ultimate");

  RuinConfig config;
  config.params = model_from(settings, true, true);
  if (method == "ultimate") {
    config.grid.horizon = require_number(settings, "t_max");
    config.ultimate = true;
  } else {
    config.grid.horizon = require_number(settings, "horizon");
  }
  config.grid.steps = static_cast<int>(require_integer(settings, "steps"));
  config.grid.validate();
  config.tilt = number_or(settings, "tilt", 1.0);
  config.n_paths = integer_or(settings, "n_mc", 10000);
  config.seed = ctx.seed;
  config.threads = ctx.threads;
  config.validate();

  const bool want_records = settings.value("paths_csv", false);
  std::vector<PathRecord> records;
  std::vector<PathRecord>* rec_ptr = want_records ? &records : nullptr;

  RuinEstimate est;
  if (method == "crude") {
    est = crude_ruin_mc(config, rec_ptr);
  } else {
    KernelWeightTable table = kernel_weight_table(config.grid, config.params);
    est = method == "girsanov" ? girsanov_ruin_mc(config, table, rec_ptr)
                               : ultimate_ruin_mc(config, table, rec_ptr);
  }

  Json result = ruin_to_json(est, config);
  write_json_atomic(ctx.emit("ruin_result.json"), result);
  if (want_records)
    write_path_records_csv(ctx.emit("ruin_paths.csv"), records);

  Json summary = result;
  summary["task"] = "ruin";
  return summary;
}

Json task_passage(const Json& settings, const RunContext& ctx) {
  check_keys(settings,
             with_globals({"v", "tilt", "moment_order", "hurst", "sigma",
                           "n_mc", "horizon", "steps", "step"}));
  PassageQuery query;
  query.barrier = require_number(settings, "v");
  query.tilt = require_number(settings, "tilt");
  if (!(query.tilt > 0.0))
    throw config_error("key \"tilt\" must be > 0 (a = 0 diverges)");
  query.moment_order = static_cast<int>(integer_or(settings, "moment_order", 1));
  query.hurst = require_number(settings, "hurst");
  query.sigma = require_number(settings, "sigma");
  query.n_paths = integer_or(settings, "n_mc", 1000);
  const double horizon =
      number_or(settings, "horizon", 3.0 * query.barrier / query.tilt);
  const double step = number_or(settings, "step", 0.05);
  if (!(step > 0.0)) throw config_error("key \"step\" must be > 0");
  query.grid.horizon = horizon;
  query.grid.steps = static_cast<int>(
      integer_or(settings, "steps", std::lround(std::ceil(horizon / step))));
  query.seed = ctx.seed;
  query.threads = ctx.threads;
  query.validate();

  PassageMoments mc = passage_moment_mc(query);
  const double bound =
      query.sigma == 1.0
          ? moment_upper_bound(query.barrier, query.tilt, query.hurst,
                               query.moment_order)
          : std::nan("");
  const double asymptote =
      std::pow(query.barrier / query.tilt, query.moment_order);

  CsvWriter csv(ctx.emit("passage_moments.csv"),
                {"v", "a", "n", "moment", "std_err", "bound",
                 "ratio_to_asymptote"});
  csv.write_row({query.barrier, query.tilt,
                 static_cast<double>(query.moment_order), mc.moment,
                 mc.std_err, bound, mc.moment / asymptote});

  Json summary;
  summary["task"] = "passage";
  summary["v"] = query.barrier;
  summary["a"] = query.tilt;
  summary["n"] = query.moment_order;
  summary["moment"] = mc.moment;
  summary["std_err"] = mc.std_err;
  summary["non_crossing_fraction"] = mc.non_crossing_fraction;
  if (query.sigma == 1.0) summary["bound"] = bound;
  summary["ratio_to_asymptote"] = mc.moment / asymptote;
  return summary;
}

// --- experiments ------------------------------------------------------------

namespace {

Json run_table1(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"hursts", "t_primes", "sigma"}));
  const std::vector<double> hursts =
      number_list_or(settings, "hursts", {0.7, 0.75});
  const std::vector<double> t_primes =
      number_list_or(settings, "t_primes", {500.0, 1000.0, 2000.0});
  const double sigma = number_or(settings, "sigma", 1.0);
  for (double tp : t_primes) {
    if (!(tp >= 2.0) || tp > 4000.0)
      throw config_error("t_primes entries must lie in [2, 4000]");
    if (static_cast<double>(std::lround(tp)) != tp)
      throw config_error("t_primes entries must be integers (h = 1)");
  }

  CsvWriter csv(ctx.emit("table1.csv"), {"hurst", "t_prime", "lhs", "rhs"});
  Json rows = Json::array();
  for (double hurst : hursts) {
    const double rhs = asymptotic_variance_constant(hurst);
    for (double tp : t_primes) {
      GridSpec grid{tp, static_cast<int>(std::lround(tp))};  // h = 1
      ModelParams params;
      params.hurst = hurst;
      params.sigma = sigma;
      KernelWeightTable table = kernel_weight_table(grid, params);
      const double variance =
          sigma / (grid.step() * table.weights(grid.steps).sum());
      const double lhs = std::pow(tp, 2.0 - 2.0 * hurst) * variance;
      csv.write_row({hurst, tp, lhs, rhs});
      Json row;
      row["hurst"] = hurst;
      row["t_prime"] = tp;
      row["lhs"] = lhs;
      row["rhs"] = rhs;
      rows.push_back(row);
    }
  }
  Json summary;
  summary["experiment"] = "table1";
  summary["rows"] = rows;
  return summary;
}

Json run_ruin_demo(const Json& settings, const RunContext& ctx) {
  check_keys(settings,
             with_globals({"u", "drift", "sigma", "hurst", "horizon", "steps",
                           "tilt", "n_mc", "t_prime", "t_prime_steps"}));
  RuinConfig config;
  config.params = model_from(settings, true, true);
  config.grid.horizon = number_or(settings, "horizon", 200.0);
  config.grid.steps = static_cast<int>(integer_or(settings, "steps", 2000));
  config.grid.validate();
  if (config.grid.steps > 4000)
    throw config_error("ruin_demo: steps must be <= 4000 (desk scale)");
  config.tilt = number_or(settings, "tilt", 1.0);
  config.n_paths = integer_or(settings, "n_mc", 10000);
  if (config.n_paths > 100000)
    throw config_error("ruin_demo: n_mc must be <= 100000");
  config.seed = ctx.seed;
  config.threads = ctx.threads;
  config.validate();

  // Crude and Girsanov share the master seed (paired paths; the agreement
  // check is conservative under positive coupling).
  RuinEstimate crude = crude_ruin_mc(config);
  KernelWeightTable table = kernel_weight_table(config.grid, config.params);
  RuinEstimate girsanov = girsanov_ruin_mc(config, table);

  const double diff = std::abs(crude.psi_hat - girsanov.psi_hat);
  const double combined = std::sqrt(crude.std_err * crude.std_err +
                                    girsanov.std_err * girsanov.std_err);

  // Plug-in stage: estimate theta from a simulated observation window, then
  // re-evaluate psi at theta_hat with a delta-method interval.
  const double t_prime = number_or(settings, "t_prime", 100.0);
  const int t_prime_steps =
      static_cast<int>(integer_or(settings, "t_prime_steps", 1000));
  GridSpec obs_grid{t_prime, t_prime_steps};
  obs_grid.validate();
  RngStream obs_rng(ctx.seed, kStreamBlock);
  MixedPath obs_path = sample_mixed_path(obs_grid, config.params, obs_rng);
  Eigen::VectorXd xi = obs_path.xi_levels();
  Eigen::VectorXd observed(obs_grid.steps);
  for (int k = 1; k <= obs_grid.steps; ++k)
    observed(k - 1) = config.params.drift * obs_grid.time(k) - xi(k - 1);

  RuinConfig eval = config;
  eval.stream_offset = 2 * kStreamBlock;
  PluginRuinCi plugin = plugin_ruin_ci(observed, obs_grid, eval);

  Json out;
  out["experiment"] = "ruin_demo";
  out["crude"] = ruin_to_json(crude, config);
  out["girsanov"] = ruin_to_json(girsanov, config);
  out["agreement_3se"] = diff <= 3.0 * combined;
  Json pj;
  pj["theta_hat"] = plugin.theta.value;
  pj["theta_variance"] = plugin.theta.variance;
  pj["t_prime"] = t_prime;
  pj["psi_hat_plugin"] = plugin.psi.psi_hat;
  pj["mc_std_err"] = plugin.psi.std_err;
  pj["d_psi_d_theta"] = plugin.psi.d_psi_d_theta;
  pj["ci_low"] = plugin.ci_low;
  pj["ci_high"] = plugin.ci_high;
  out["plugin"] = pj;
  write_json_atomic(ctx.emit("ruin_demo.json"), out);
  return out;
}

Json run_clt_hist(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"replications", "steps", "horizon",
                                     "hurst", "sigma", "drift"}));
  const long reps = integer_or(settings, "replications", 2000);
  if (reps < 500)
    throw config_error("clt_hist: replications must be >= 500");
  GridSpec grid;
  grid.steps = static_cast<int>(integer_or(settings, "steps", 128));
  grid.horizon = number_or(settings, "horizon", 0.1 * grid.steps);
  grid.validate();
  ModelParams params;
  params.hurst = number_or(settings, "hurst", 0.618);
  params.sigma = number_or(settings, "sigma", 0.25);
  params.drift = number_or(settings, "drift", 1.0);
  params.validate();

  const KernelWeightTable table = kernel_weight_table(grid, params);
  const FgnSampler sampler(grid.steps, params.hurst, grid.step());
  const double h = grid.step();

  std::vector<double> theta_hats(reps), phis(reps);
  parallel_for(reps, ctx.threads, [&](long begin, long end) {
    for (long r = begin; r < end; ++r) {
      RngStream rng(ctx.seed, static_cast<std::uint64_t>(r));
      MixedPath path = sample_mixed_path(grid, params, rng, sampler);
      // dY = theta*h - d_xi: observation increments under the true drift.
      Eigen::VectorXd d_y = (params.drift * h - path.d_xi.array()).matrix();
      DriftEstimate est = mle_kernel(d_y, table);
      theta_hats[r] = est.value;
      phis[r] = normalized_stat(est.value, params.drift, est.variance);
    }
  });

  {
    CsvWriter csv(ctx.emit("clt_replicates.csv"),
                  {"replicate", "theta_hat", "phi"});
    for (long r = 0; r < reps; ++r)
      csv.write_raw_row(std::to_string(r) + ',' +
                        CsvWriter::format(theta_hats[r]) + ',' +
                        CsvWriter::format(phis[r]));
  }

  SampleStats s = sample_stats(phis);
  Json out;
  out["experiment"] = "clt_hist";
  out["replications"] = reps;
  out["mean"] = s.mean;
  out["sd"] = std::sqrt(s.variance);
  out["skewness"] = s.skewness;
  out["kurtosis"] = s.kurtosis;
  out["jarque_bera"] = jarque_bera(s);
  out["normality_rejected_1pct"] = jarque_bera_rejects_1pct(s);
  out["theta_variance_exact"] =
      table.sigma / (h * table.weights(grid.steps).sum());
  write_json_atomic(ctx.emit("clt_summary.json"), out);
  return out;
}

Json run_passage_scan(const Json& settings, const RunContext& ctx) {
  check_keys(settings, with_globals({"barriers", "tilt", "hurst", "sigma",
                                     "moment_order", "n_mc", "step"}));
  const std::vector<double> barriers =
      number_list_or(settings, "barriers", {20.0, 50.0, 100.0});
  const double tilt = number_or(settings, "tilt", 2.0);
  if (!(tilt > 0.0))
    throw config_error("key \"tilt\" must be > 0 (a = 0 diverges)");
  const double hurst = number_or(settings, "hurst", 0.7);
  const double sigma = number_or(settings, "sigma", 1.0);
  const int order = static_cast<int>(integer_or(settings, "moment_order", 1));
  const long n_mc = integer_or(settings, "n_mc", 1000);
  const double step = number_or(settings, "step", 0.05);
  if (!(step > 0.0)) throw config_error("key \"step\" must be > 0");

  CsvWriter csv(ctx.emit("passage_scan.csv"),
                {"v", "a", "n", "moment", "std_err", "bound",
                 "ratio_to_asymptote"});
  Json rows = Json::array();
  std::uint64_t block = 0;
  for (double v : barriers) {
    PassageQuery query;
    query.barrier = v;
    query.tilt = tilt;
    query.moment_order = order;
    query.hurst = hurst;
    query.sigma = sigma;
    query.n_paths = n_mc;
    query.grid.horizon = 3.0 * v / tilt;
    query.grid.steps =
        static_cast<int>(std::lround(std::ceil(query.grid.horizon / step)));
    query.seed = ctx.seed;
    query.stream_offset = block;
    query.threads = ctx.threads;
    query.validate();
    block += kStreamBlock;

    PassageMoments mc = passage_moment_mc(query);
    const double bound =
        sigma == 1.0 ? moment_upper_bound(v, tilt, hurst, order) : std::nan("");
    const double ratio = mc.moment / std::pow(v / tilt, order);
    csv.write_row({v, tilt, static_cast<double>(order), mc.moment, mc.std_err,
                   bound, ratio});
    Json row;
    row["v"] = v;
    row["moment"] = mc.moment;
    row["std_err"] = mc.std_err;
    if (sigma == 1.0) row["bound"] = bound;
    row["ratio_to_asymptote"] = ratio;
    row["non_crossing_fraction"] = mc.non_crossing_fraction;
    rows.push_back(row);
  }
  Json summary;
  summary["experiment"] = "passage_scan";
  summary["rows"] = rows;
  return summary;
}

Json run_custom(const Json& settings, const RunContext& ctx) {
  const std::string task = string_or(settings, "task", "");
  if (task == "simulate") return task_simulate(settings, ctx);
  if (task == "kernel") return task_kernel(settings, ctx);
  if (task == "estimate-drift") return task_estimate_drift(settings, ctx);
  if (task == "ruin") return task_ruin(settings, ctx);
  if (task == "passage") return task_passage(settings, ctx);
  if (task.empty())
    throw config_error("missing required key \"task\" for custom experiment");
  throw config_error("unknown task \"" + task + "\"");
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& root) {
  if (!root.is_object()) throw config_error("config must be a JSON object");
  ExperimentConfig config;
  const Json* exp = find_key(root, "experiment");
  if (!exp) throw config_error("missing required key \"experiment\"");
  if (!exp->is_string())
    throw config_error("key \"experiment\" must be a string");
  config.experiment = exp->get<std::string>();

  if (const Json* seed = find_key(root, "seed")) {
    if (!seed->is_number())
      throw config_error("key \"seed\" must be an unsigned integer");
    config.seed = seed->get<std::uint64_t>();
  }
  config.threads = static_cast<int>(integer_or(root, "threads", 0));
  config.out_dir = string_or(root, "out_dir", ".");

  config.settings = root;
  return config;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  static const std::vector<std::string> known = {
      "table1", "ruin_demo", "clt_hist", "passage_scan", "custom"};
  if (std::find(known.begin(), known.end(), config.experiment) == known.end())
    throw config_error("unknown experiment id \"" + config.experiment + "\"");

  fs::create_directories(config.out_dir);

  ExperimentResult result;
  RunContext ctx;
  ctx.seed = config.seed;
  ctx.threads = config.threads;
  ctx.out_dir = config.out_dir;
  ctx.outputs = &result.outputs;

  const auto t0 = std::chrono::steady_clock::now();
  if (config.experiment == "table1")
    result.summary = run_table1(config.settings, ctx);
  else if (config.experiment == "ruin_demo")
    result.summary = run_ruin_demo(config.settings, ctx);
  else if (config.experiment == "clt_hist")
    result.summary = run_clt_hist(config.settings, ctx);
  else if (config.experiment == "passage_scan")
    result.summary = run_passage_scan(config.settings, ctx);
  else
    result.summary = run_custom(config.settings, ctx);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;

  Json manifest;
  Json echo = config.settings;
  echo["seed"] = config.seed;
  manifest["experiment"] = config.experiment;
  manifest["config"] = echo;
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["duration_seconds"] = elapsed.count();
  Json files = Json::array();
  for (const auto& p : result.outputs) {
    Json f;
    f["file"] = p.filename().string();
    f["bytes"] = static_cast<std::uint64_t>(fs::file_size(p));
    f["fnv1a64"] = to_hex(file_checksum(p));
    files.push_back(f);
  }
  manifest["outputs"] = files;
  const fs::path manifest_path = config.out_dir / "manifest.json";
  write_json_atomic(manifest_path, manifest);
  result.outputs.push_back(manifest_path);
  return result;
}

}  // namespace mfruin

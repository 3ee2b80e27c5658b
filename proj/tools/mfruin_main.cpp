// Command-line front end for the mixed-fBm surplus toolkit.
//
// Subcommands: simulate, kernel, estimate-drift, ruin, passage,
// experiment <id>. Global flags: --config <file>, --seed <u64>,
// --threads <int>, --out <dir>. Exit codes: 0 success, 2 configuration
// error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfruin/errors.hpp"
#include "mfruin/experiments.hpp"

namespace {

using mfruin::Json;

// Records CLI option -> config key pairs and applies only the options the
// user actually passed, so config-file values survive unless overridden.
class SettingsBinder {
 public:
  explicit SettingsBinder(CLI::App* cmd) : cmd_(cmd) {}

  void number(const std::string& flag, const std::string& key,
              const std::string& desc) {
    auto store = std::make_shared<double>(0.0);
    numbers_.push_back({cmd_->add_option(flag, *store, desc), key, store});
  }
  void integer(const std::string& flag, const std::string& key,
               const std::string& desc) {
    auto store = std::make_shared<long>(0);
    integers_.push_back({cmd_->add_option(flag, *store, desc), key, store});
  }
  void text(const std::string& flag, const std::string& key,
            const std::string& desc) {
    auto store = std::make_shared<std::string>();
    texts_.push_back({cmd_->add_option(flag, *store, desc), key, store});
  }
  void boolean(const std::string& flag, const std::string& key,
               const std::string& desc) {
    auto store = std::make_shared<bool>(false);
    bools_.push_back({cmd_->add_flag(flag, *store, desc), key, store});
  }

  void apply(Json& settings) const {
    for (const auto& [opt, key, store] : numbers_)
      if (opt->count()) settings[key] = *store;
    for (const auto& [opt, key, store] : integers_)
      if (opt->count()) settings[key] = *store;
    for (const auto& [opt, key, store] : texts_)
      if (opt->count()) settings[key] = *store;
    for (const auto& [opt, key, store] : bools_)
      if (opt->count()) settings[key] = *store;
  }

 private:
  template <typename T>
  struct Bound {
    CLI::Option* opt;
    std::string key;
    std::shared_ptr<T> store;
  };
  CLI::App* cmd_;
  std::vector<Bound<double>> numbers_;
  std::vector<Bound<long>> integers_;
  std::vector<Bound<std::string>> texts_;
  std::vector<Bound<bool>> bools_;
};

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mfruin::config_error("cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw mfruin::config_error(std::string("config file is not valid JSON: ") +
                               e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfruin: simulation and estimation for mixed fractional "
               "Brownian surplus processes"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON configuration file")
      ->expected(1);
  auto* seed_opt = app.add_option("--seed", seed, "master RNG seed (uint64)");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads (0 = all cores)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  struct Sub {
    CLI::App* cmd = nullptr;
    std::unique_ptr<SettingsBinder> bind;
  };
  auto make_sub = [&](const std::string& name, const std::string& desc) {
    Sub s;
    s.cmd = app.add_subcommand(name, desc);
    // Let --config/--seed/--threads/--out appear after the subcommand name.
    s.cmd->fallthrough();
    s.bind = std::make_unique<SettingsBinder>(s.cmd);
    return s;
  };

  Sub simulate = make_sub("simulate", "generate mixed-fBm surplus paths");
  simulate.bind->number("--hurst", "hurst", "Hurst parameter H in (1/2,1)");
  simulate.bind->number("--sigma", "sigma", "diffusion scale");
  simulate.bind->number("--drift", "drift", "premium drift theta");
  simulate.bind->number("--u", "u", "initial reserve");
  simulate.bind->number("--horizon", "horizon", "time horizon T");
  simulate.bind->integer("--steps", "steps", "grid steps n");
  simulate.bind->integer("--paths", "paths", "number of paths to dump");
  simulate.bind->text("--method", "method", "circulant | dense_factor");

  Sub kernel = make_sub("kernel", "fundamental-martingale weight table");
  kernel.bind->number("--hurst", "hurst", "Hurst parameter");
  kernel.bind->number("--sigma", "sigma", "diffusion scale");
  kernel.bind->number("--horizon", "horizon", "time horizon T");
  kernel.bind->integer("--steps", "steps", "grid steps n");
  kernel.bind->boolean("--full-table", "full_table",
                       "dump every horizon row (O(n^2) lines)");
  kernel.bind->integer("--nystrom-nodes", "nystrom_nodes",
                       "also solve the continuous kernel equation on this "
                       "many nodes and cross-check");

  Sub estimate = make_sub("estimate-drift", "drift MLE from levels");
  estimate.bind->number("--hurst", "hurst", "Hurst parameter");
  estimate.bind->number("--sigma", "sigma", "diffusion scale");
  estimate.bind->number("--drift", "drift",
                        "true drift (simulation mode only)");
  estimate.bind->number("--u", "u", "initial reserve of input surplus");
  estimate.bind->number("--horizon", "horizon", "time horizon T");
  estimate.bind->integer("--steps", "steps", "grid steps n");
  estimate.bind->text("--input", "input",
                      "CSV with a Y (drift levels) or X (surplus) column; "
                      "omit to simulate");

  Sub ruin = make_sub("ruin", "ruin-probability Monte Carlo");
  ruin.bind->number("--u", "u", "initial reserve");
  ruin.bind->number("--drift", "drift", "premium drift theta");
  ruin.bind->number("--sigma", "sigma", "diffusion scale");
  ruin.bind->number("--hurst", "hurst", "Hurst parameter");
  ruin.bind->number("--horizon", "horizon", "finite horizon T");
  ruin.bind->integer("--steps", "steps", "grid steps n");
  ruin.bind->text("--method", "method", "crude | girsanov | ultimate");
  ruin.bind->number("--tilt", "tilt", "Girsanov tilt a");
  ruin.bind->integer("--n-mc", "n_mc", "Monte Carlo paths");
  ruin.bind->number("--t-max", "t_max", "truncation horizon (ultimate mode)");
  ruin.bind->boolean("--paths-csv", "paths_csv",
                     "dump per-path crossing records");

  Sub passage = make_sub("passage", "first-passage moments and bounds");
  passage.bind->number("--v", "v", "barrier level");
  passage.bind->number("--tilt", "tilt", "drift a of the crossed process");
  passage.bind->integer("--moment-order", "moment_order", "moment order n");
  passage.bind->number("--hurst", "hurst", "Hurst parameter");
  passage.bind->number("--sigma", "sigma", "diffusion scale");
  passage.bind->integer("--n-mc", "n_mc", "Monte Carlo paths");
  passage.bind->number("--horizon", "horizon",
                       "simulation horizon (default 3v/a)");
  passage.bind->integer("--steps", "steps", "grid steps");
  passage.bind->number("--step", "step", "grid step size (default 0.05)");

  CLI::App* experiment =
      app.add_subcommand("experiment", "run a packaged experiment");
  experiment->fallthrough();
  std::string experiment_id;
  experiment->add_option("id", experiment_id,
                         "table1 | ruin_demo | clt_hist | passage_scan | "
                         "custom (may also come from --config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Json base = Json::object();
    if (!config_path.empty()) base = load_config_file(config_path);
    if (!base.is_object())
      throw mfruin::config_error("config must be a JSON object");

    // Precedence: CLI flag > config file > built-in default.
    mfruin::RunContext ctx;
    if (base.contains("seed")) {
      if (!base["seed"].is_number())
        throw mfruin::config_error("key \"seed\" must be an unsigned integer");
      ctx.seed = base["seed"].get<std::uint64_t>();
    }
    if (seed_opt->count()) ctx.seed = seed;
    ctx.threads = static_cast<int>(mfruin::integer_or(base, "threads", 0));
    if (threads_opt->count()) ctx.threads = threads;
    ctx.out_dir = mfruin::string_or(base, "out_dir", ".");
    if (out_opt->count()) ctx.out_dir = out_dir;
    std::filesystem::create_directories(ctx.out_dir);

    Json summary;
    if (experiment->parsed()) {
      Json root = base;
      if (!experiment_id.empty()) root["experiment"] = experiment_id;
      if (seed_opt->count()) root["seed"] = seed;
      if (threads_opt->count()) root["threads"] = threads;
      if (out_opt->count()) root["out_dir"] = ctx.out_dir.string();
      mfruin::ExperimentConfig config = mfruin::parse_experiment_config(root);
      mfruin::ExperimentResult result = mfruin::run_experiment(config);
      summary = result.summary;
    } else {
      Json settings = base;
      settings.erase("seed");
      settings.erase("threads");
      settings.erase("out_dir");
      if (simulate.cmd->parsed()) {
        simulate.bind->apply(settings);
        summary = mfruin::task_simulate(settings, ctx);
      } else if (kernel.cmd->parsed()) {
        kernel.bind->apply(settings);
        summary = mfruin::task_kernel(settings, ctx);
      } else if (estimate.cmd->parsed()) {
        estimate.bind->apply(settings);
        summary = mfruin::task_estimate_drift(settings, ctx);
      } else if (ruin.cmd->parsed()) {
        ruin.bind->apply(settings);
        summary = mfruin::task_ruin(settings, ctx);
      } else if (passage.cmd->parsed()) {
        passage.bind->apply(settings);
        summary = mfruin::task_passage(settings, ctx);
      }
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const mfruin::config_error& e) {
    std::cerr << "configuration error: " << e.what() << std::endl;
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << std::endl;
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << std::endl;
    return 2;
  } catch (const mfruin::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  }
}

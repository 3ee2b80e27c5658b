#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfruin {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Disjoint stream-index blocks keep Monte Carlo stages within one run
// statistically independent while still derived from the single master seed.
inline constexpr std::uint64_t kStreamBlock = 1ull << 32;

using Json = nlohmann::ordered_json;

struct RunContext {
  std::uint64_t seed = 12345;
  int threads = 0;
  std::filesystem::path out_dir = ".";
  std::vector<std::filesystem::path>* outputs = nullptr;

  std::filesystem::path emit(const std::string& name) const;
};

// --- config plumbing -------------------------------------------------------

// Strict key-set validation: every present key must be in `allowed`,
// otherwise a config_error naming the offending key is thrown.
void check_keys(const Json& j, const std::vector<std::string>& allowed);

double require_number(const Json& j, const std::string& key);
double number_or(const Json& j, const std::string& key, double fallback);
long integer_or(const Json& j, const std::string& key, long fallback);
long require_integer(const Json& j, const std::string& key);
std::string string_or(const Json& j, const std::string& key,
                      const std::string& fallback);
std::vector<double> number_list_or(const Json& j, const std::string& key,
                                   const std::vector<double>& fallback);

void write_json_atomic(const std::filesystem::path& path, const Json& value);

// --- single-task front ends (shared by CLI subcommands and `custom`) -------

Json task_simulate(const Json& settings, const RunContext& ctx);
Json task_kernel(const Json& settings, const RunContext& ctx);
Json task_estimate_drift(const Json& settings, const RunContext& ctx);
Json task_ruin(const Json& settings, const RunContext& ctx);
Json task_passage(const Json& settings, const RunContext& ctx);

// --- experiments ------------------------------------------------------------

struct ExperimentConfig {
  std::string experiment;  // table1 | ruin_demo | clt_hist | passage_scan | custom
  Json settings;           // experiment-specific keys (globals removed)
  std::uint64_t seed = 12345;
  int threads = 0;
  std::filesystem::path out_dir = ".";
};

ExperimentConfig parse_experiment_config(const Json& root);

struct ExperimentResult {
  Json summary;
  std::vector<std::filesystem::path> outputs;  // includes the manifest
};

// Runs the experiment, writes its data files plus manifest.json (config echo,
// toolkit version, duration, file checksums) into the output directory.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace mfruin

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssbo/metrics.hpp"
#include "ssbo/optimizer.hpp"

namespace ssbo::bench {

struct Condition {
  std::string name;
  RunConfig config;
};

struct ExperimentConfig {
  std::string experiment = "experiment";
  int replicates = 50;
  std::uint64_t base_seed = 0;
  std::string out_dir = "out";
  std::vector<Condition> conditions;
  nlohmann::json effective;  // defaults merged into every condition
};

// Parses the nested-object config layout. Unknown keys, bad enum strings,
// or missing conditions raise ConfigError with the offending path.
// top_overrides patches root keys (replicates, base_seed, out);
// condition_overrides is deep-merged into every condition after its own
// settings, so command-line flags win. The merged result is what gets
// hashed and recorded.
ExperimentConfig parse_experiment(
    nlohmann::json root,
    const nlohmann::json& condition_overrides = nlohmann::json::object(),
    const nlohmann::json& top_overrides = nlohmann::json::object());
ExperimentConfig load_experiment_file(
    const std::filesystem::path& path,
    const nlohmann::json& condition_overrides = nlohmann::json::object(),
    const nlohmann::json& top_overrides = nlohmann::json::object());

// FNV-1a 64-bit over the canonical (sorted-key) dump.
std::string config_hash(const nlohmann::json& j);

// Runs every condition x replicate (replicate seed = base_seed + id),
// buffers all traces in memory, and only then writes the bundle:
//   <out>/manifest.json
//   <out>/traces/<condition>_r<k>.csv
//   <out>/summary/<condition>_summary.csv
//   <out>/summary/<condition>_bound.json   (expected-UCB conditions)
// Any replicate failure aborts before anything is written. Worker count
// comes from SSBO_THREADS (default: hardware concurrency, capped by the
// number of replicates). Traces are independent of the worker count.
void execute_experiment(const ExperimentConfig& config, std::ostream& log);

// Rebuilds the summary and bound files from the traces already on disk.
// Requires a manifest whose schema and config hash check out.
void write_report(const std::filesystem::path& out_dir, std::ostream& log);

// Trace file round-trip.
void write_trace_csv(std::ostream& os, const RunTrace& trace,
                     const Domain& domain);
std::vector<RunTrace> read_trace_csvs(
    const std::vector<std::filesystem::path>& files);

void write_summary_csv(std::ostream& os, const CurveSummary& summary);

int worker_count(int replicates);

}  // namespace ssbo::bench

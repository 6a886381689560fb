// Experiment configuration, seeded runs, sweeps and result bundles on disk.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "llnsim/metrics.hpp"
#include "llnsim/network.hpp"
#include "llnsim/scenario.hpp"

namespace llnsim {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
/// Environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "LLNSIM_OUTPUT_DIR";

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::rpl;
  std::size_t node_count = 25;
  double rht_seconds = 600.0;
  double dio_min_seconds = 4.0;
  double dio_max_seconds = 1048.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double sim_hours = 8.0;
  RadioConfig radio;
  MacConfig mac;
  std::size_t route_capacity = 20;
  std::size_t neighbor_table_cap = 8;
  /// Fixed topology for every seed; generated per seed when empty.
  std::optional<std::string> scenario_file;
  std::string output_dir = "results";

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
  SimConfig sim_config(std::uint64_t seed) const;
  /// Everything that influences results except the seed list and output dir.
  std::string key() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing fields keep their defaults. Throws ConfigError on bad values or types.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// Everything one seeded run produces.
struct RunOutput {
  RunMetrics metrics;
  Topology topology;
  std::vector<OverheadSample> overhead;
  std::vector<TableSample> tables;
  std::vector<DropRecord> drops;
};

Topology load_or_generate_topology(const ExperimentConfig& cfg, std::uint64_t seed);
RunOutput run_seed(const ExperimentConfig& cfg, std::uint64_t seed, std::ostream* trace = nullptr);

/// delays.csv, hops.csv, tables.csv, overhead.csv, drops.csv and scenario.json.
void write_run_files(const RunOutput& run, const std::filesystem::path& dir);
nlohmann::json summarize(const ExperimentConfig& cfg, std::span<const RunMetrics> runs);
/// 0.0, 0.1, ..., 5.0 seconds.
std::vector<double> delay_grid();

struct ResultBundle {
  std::filesystem::path dir;
  std::vector<RunMetrics> runs;
  RunAggregate aggregate;
  nlohmann::json summary;
};

/// Run every seed and write the bundle to `out_dir` (defaults to cfg.output_dir).
/// The directory only appears once every run has succeeded.
ResultBundle run_experiment(const ExperimentConfig& cfg, std::optional<std::filesystem::path> out_dir = std::nullopt);

enum class SweepAxis : std::uint8_t { nodes, rht };
SweepAxis sweep_axis_from_string(std::string_view name);
std::string_view to_string(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  Protocol protocol = Protocol::rpl;
  Interval mean_entries;
  Interval overhead_bytes;
};

struct SweepResult {
  std::filesystem::path dir;
  std::vector<SweepRow> rows;
};

/// One bundle per axis value under `out_dir`, plus sweep.csv across points.
SweepResult sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values,
                  std::optional<std::filesystem::path> out_dir = std::nullopt);

}  // namespace llnsim

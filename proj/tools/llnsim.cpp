// Command-line front end: run, sweep and generate.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "llnsim/experiment.hpp"

using namespace llnsim;
namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_file;
  std::string protocol;
  std::size_t nodes = 0;
  std::vector<std::uint64_t> seeds;
  double rht = 0.0;
  double hours = 0.0;
  std::string scenario;
  std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--protocol", o.protocol, "rpl or loadng")->check(CLI::IsMember({"rpl", "loadng"}));
  cmd->add_option("--nodes", o.nodes, "node count");
  cmd->add_option("--seeds", o.seeds,
                  "a single number N means seeds 1..N; several numbers are used as the seed list");
  cmd->add_option("--rht", o.rht, "LOADng route hold time in seconds");
  cmd->add_option("--hours", o.hours, "simulated hours");
  cmd->add_option("--scenario", o.scenario, "fixed topology JSON")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ConfigError("cannot open " + o.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(o.config_file + ": " + e.what());
    }
    cfg = experiment_config_from_json(j);
  }
  if (!o.protocol.empty()) cfg.protocol = protocol_from_string(o.protocol);
  if (o.nodes != 0) cfg.node_count = o.nodes;
  if (o.seeds.size() == 1) {
    if (o.seeds[0] == 0) throw ConfigError("--seeds must be positive");
    cfg.seeds.resize(o.seeds[0]);
    std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{1});
  } else if (!o.seeds.empty()) {
    cfg.seeds = o.seeds;
  }
  if (o.rht != 0.0) cfg.rht_seconds = o.rht;
  if (o.hours != 0.0) cfg.sim_hours = o.hours;
  if (!o.scenario.empty()) cfg.scenario_file = o.scenario;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
  cfg.validate();
  return cfg;
}

void print_interval(const char* label, const Interval& in) {
  std::cout << label << ": " << in.mean;
  if (in.half_width) std::cout << " +/- " << *in.half_width;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for RPL and LOADng home networks"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Overrides run_opts;
  std::string trace_file;
  auto* run = app.add_subcommand("run", "run every seed of one configuration");
  add_common(run, run_opts);
  run->add_option("--trace", trace_file, "write the event trace of the first seed to this file");

  Overrides sweep_opts;
  std::string axis_name;
  std::vector<double> axis_values;
  auto* sw = app.add_subcommand("sweep", "run one configuration per axis value");
  add_common(sw, sweep_opts);
  sw->add_option("--axis", axis_name, "nodes or rht")->required();
  sw->add_option("--values", axis_values, "axis values")->required();

  std::size_t gen_nodes = 25;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a generated topology as scenario JSON");
  gen->add_option("--nodes", gen_nodes, "node count");
  gen->add_option("--seed", gen_seed, "topology seed");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = build_config(run_opts);
      const ResultBundle bundle = run_experiment(cfg);
      if (!trace_file.empty()) {
        std::ofstream trace(trace_file, std::ios::binary);
        if (!trace) throw std::runtime_error("cannot write " + trace_file);
        run_seed(cfg, cfg.seeds.front(), &trace);
      }
      std::cout << "wrote " << bundle.dir.string() << " (" << bundle.runs.size() << " runs)\n";
      print_interval("mean table entries", bundle.aggregate.mean_table_entries);
      print_interval("control bytes", bundle.aggregate.overhead_bytes);
      print_interval("delivery ratio", bundle.aggregate.delivery_ratio);
    } else if (*sw) {
      const ExperimentConfig cfg = build_config(sweep_opts);
      const SweepAxis axis = sweep_axis_from_string(axis_name);
      const SweepResult result = sweep(cfg, axis, axis_values);
      std::cout << "wrote " << (result.dir / "sweep.csv").string() << '\n';
      for (const auto& row : result.rows) {
        std::cout << to_string(axis) << '=' << row.axis_value << "  entries " << row.mean_entries.mean
                  << "  control bytes " << row.overhead_bytes.mean << '\n';
      }
    } else if (*gen) {
      if (gen_nodes < 2) throw ConfigError("--nodes must be at least 2");
      const Topology topo = generate_topology(gen_nodes, gen_seed, FloorPlan::default_house());
      const std::string text = to_json(topo).dump(2) + "\n";
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(gen_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + gen_out);
        out << text;
        std::cerr << "mean degree " << mean_degree(topo.positions, 5.0) << '\n';
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

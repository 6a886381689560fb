#include "llnsim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace llnsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Duration to_micros(double seconds_value) {
  return static_cast<Duration>(std::llround(seconds_value * 1e6));
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string seconds_str(SimTime t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%llu.%06llu", static_cast<unsigned long long>(t / kMicrosPerSecond),
                static_cast<unsigned long long>(t % kMicrosPerSecond));
  return buf;
}

json interval_json(const Interval& in) {
  json j{{"mean", in.mean}, {"n", in.n}};
  j["ci95"] = in.half_width ? json(*in.half_width) : json(nullptr);
  return j;
}

template <typename T>
T field(const json& j, const char* name, T fallback) {
  if (!j.contains(name) || j.at(name).is_null()) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + name + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path resolve_out_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& out_dir) {
  return out_dir ? *out_dir : fs::path(cfg.output_dir);
}

/// Writes into a sibling staging directory, then moves it into place.
template <typename Fn>
void write_atomically(const fs::path& target, Fn&& fill) {
  fs::path staging = target;
  staging += ".partial";
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    fill(staging);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  fs::remove_all(target);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::rename(staging, target);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!scenario_file && node_count < 5) throw ConfigError("node_count must be at least 5");
  if (!(rht_seconds > 0.0)) throw ConfigError("rht_seconds must be positive");
  if (!(dio_min_seconds > 0.0)) throw ConfigError("dio_min_seconds must be positive");
  if (!(dio_max_seconds >= dio_min_seconds)) throw ConfigError("dio_max_seconds must be >= dio_min_seconds");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (!(sim_hours > 0.0)) throw ConfigError("sim_hours must be positive");
  if (!(radio.range_m > 0.0)) throw ConfigError("radio.range_m must be positive");
  if (!(radio.loss_factor >= 0.0 && radio.loss_factor <= 1.0)) throw ConfigError("radio.loss_factor must be in [0, 1]");
  if (mac.queue_capacity == 0) throw ConfigError("mac.queue_capacity must be positive");
  if (mac.max_attempts == 0) throw ConfigError("mac.max_attempts must be positive");
  if (mac.wake_interval == 0) throw ConfigError("mac.wake_interval_ms must be positive");
  if (mac.backoff_unit == 0) throw ConfigError("mac.backoff_unit_ms must be positive");
  if (route_capacity == 0) throw ConfigError("route_capacity must be positive");
  if (neighbor_table_cap == 0) throw ConfigError("neighbor_table_cap must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

SimConfig ExperimentConfig::sim_config(std::uint64_t seed) const {
  SimConfig sc;
  sc.protocol = protocol;
  sc.radio = radio;
  sc.mac = mac;
  sc.rpl.dio_min = to_micros(dio_min_seconds);
  sc.rpl.dio_max = to_micros(dio_max_seconds);
  sc.rpl.route_capacity = route_capacity;
  sc.rpl.neighbor_table_cap = neighbor_table_cap;
  sc.loadng.route_hold_time = to_micros(rht_seconds);
  sc.loadng.route_capacity = route_capacity;
  sc.horizon = to_micros(sim_hours * 3600.0);
  sc.seed = seed;
  return sc;
}

std::string ExperimentConfig::key() const {
  json j = to_json(*this);
  j.erase("seeds");
  j.erase("output_dir");
  return j.dump();
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["protocol"] = to_string(cfg.protocol);
  j["node_count"] = cfg.node_count;
  j["rht_seconds"] = cfg.rht_seconds;
  j["dio_min_seconds"] = cfg.dio_min_seconds;
  j["dio_max_seconds"] = cfg.dio_max_seconds;
  j["seeds"] = cfg.seeds;
  j["sim_hours"] = cfg.sim_hours;
  j["radio"] = {{"range_m", cfg.radio.range_m}, {"loss_factor", cfg.radio.loss_factor}};
  j["mac"] = {{"queue_capacity", cfg.mac.queue_capacity},
              {"max_attempts", cfg.mac.max_attempts},
              {"wake_interval_ms", static_cast<double>(cfg.mac.wake_interval) / 1000.0},
              {"backoff_unit_ms", static_cast<double>(cfg.mac.backoff_unit) / 1000.0}};
  j["route_capacity"] = cfg.route_capacity;
  j["neighbor_table_cap"] = cfg.neighbor_table_cap;
  j["scenario_file"] = cfg.scenario_file ? json(*cfg.scenario_file) : json(nullptr);
  j["output_dir"] = cfg.output_dir;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.protocol = protocol_from_string(field<std::string>(j, "protocol", "rpl"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto positive_int = [&](const char* name, double fallback) {
    const double v = field<double>(j, name, fallback);
    if (!(v > 0.0) || v != std::floor(v)) throw ConfigError(std::string(name) + " must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  cfg.node_count = positive_int("node_count", static_cast<double>(cfg.node_count));
  cfg.rht_seconds = field<double>(j, "rht_seconds", cfg.rht_seconds);
  cfg.dio_min_seconds = field<double>(j, "dio_min_seconds", cfg.dio_min_seconds);
  cfg.dio_max_seconds = field<double>(j, "dio_max_seconds", cfg.dio_max_seconds);
  cfg.seeds = field<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
  cfg.sim_hours = field<double>(j, "sim_hours", cfg.sim_hours);
  if (j.contains("radio")) {
    const json& r = j.at("radio");
    cfg.radio.range_m = field<double>(r, "range_m", cfg.radio.range_m);
    cfg.radio.loss_factor = field<double>(r, "loss_factor", cfg.radio.loss_factor);
  }
  if (j.contains("mac")) {
    const json& m = j.at("mac");
    const double queue = field<double>(m, "queue_capacity", static_cast<double>(cfg.mac.queue_capacity));
    const double attempts = field<double>(m, "max_attempts", static_cast<double>(cfg.mac.max_attempts));
    const double wake_ms = field<double>(m, "wake_interval_ms", static_cast<double>(cfg.mac.wake_interval) / 1000.0);
    const double unit_ms = field<double>(m, "backoff_unit_ms", wake_ms / 16.0);
    if (!(queue >= 1.0) || !(attempts >= 1.0) || !(wake_ms > 0.0) || !(unit_ms > 0.0)) {
      throw ConfigError("mac knobs must be positive");
    }
    cfg.mac.queue_capacity = static_cast<std::size_t>(queue);
    cfg.mac.max_attempts = static_cast<std::uint32_t>(attempts);
    cfg.mac.wake_interval = static_cast<Duration>(std::llround(wake_ms * 1000.0));
    cfg.mac.backoff_unit = static_cast<Duration>(std::llround(unit_ms * 1000.0));
  }
  cfg.route_capacity = positive_int("route_capacity", static_cast<double>(cfg.route_capacity));
  cfg.neighbor_table_cap = positive_int("neighbor_table_cap", static_cast<double>(cfg.neighbor_table_cap));
  if (j.contains("scenario_file") && !j.at("scenario_file").is_null()) {
    cfg.scenario_file = field<std::string>(j, "scenario_file", "");
    if (cfg.scenario_file->empty()) cfg.scenario_file.reset();
  }
  cfg.output_dir = field<std::string>(j, "output_dir", cfg.output_dir);
  cfg.validate();
  return cfg;
}

Topology load_or_generate_topology(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.scenario_file) {
    std::ifstream in(*cfg.scenario_file);
    if (!in) throw ConfigError("cannot open scenario file " + *cfg.scenario_file);
    try {
      return topology_from_json(json::parse(in));
    } catch (const std::exception& e) {
      throw ConfigError("bad scenario file " + *cfg.scenario_file + ": " + e.what());
    }
  }
  PlacementConfig placement;
  placement.range_m = cfg.radio.range_m;
  return generate_topology(cfg.node_count, seed, FloorPlan::default_house(), placement);
}

RunOutput run_seed(const ExperimentConfig& cfg, std::uint64_t seed, std::ostream* trace) {
  RunOutput out;
  out.topology = load_or_generate_topology(cfg, seed);
  Network net(out.topology, cfg.sim_config(seed));
  net.set_trace(trace);
  out.metrics = net.run();
  out.metrics.config_key = cfg.key();
  out.overhead = net.collector().overhead();
  out.tables = net.collector().tables();
  out.drops = net.collector().drops();
  return out;
}

void write_run_files(const RunOutput& run, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ostringstream s;
    s << "packet_id,src,dst,hops,delay_us\n";
    for (const auto& d : run.metrics.deliveries) {
      s << d.packet_id << ',' << d.src << ',' << d.dst << ',' << d.hops << ',' << d.delay << '\n';
    }
    write_text(dir / "delays.csv", s.str());
  }
  {
    std::map<std::pair<NodeId, NodeId>, std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (const auto& d : run.metrics.deliveries) {
      auto& acc = pairs[{d.src, d.dst}];
      ++acc.first;
      acc.second += d.hops;
    }
    std::ostringstream s;
    s << "src,dst,packets,path_hops\n";
    for (const auto& [pair, acc] : pairs) {
      s << pair.first << ',' << pair.second << ',' << acc.first << ','
        << fixed6(static_cast<double>(acc.second) / static_cast<double>(acc.first)) << '\n';
    }
    write_text(dir / "hops.csv", s.str());
  }
  {
    std::ostringstream s;
    s << "node,time_s,entries\n";
    for (const auto& t : run.tables) s << t.node << ',' << seconds_str(t.time) << ',' << t.entries << '\n';
    write_text(dir / "tables.csv", s.str());
  }
  {
    std::ostringstream s;
    s << "node,kind,bytes,time_s\n";
    for (const auto& o : run.overhead) {
      s << o.node << ',' << o.kind << ',' << o.bytes << ',' << seconds_str(o.time) << '\n';
    }
    write_text(dir / "overhead.csv", s.str());
  }
  {
    std::ostringstream s;
    s << "packet_id,node,cause,time_s\n";
    for (const auto& d : run.drops) {
      if (d.packet_id) s << *d.packet_id;
      s << ',' << d.node << ',' << d.cause << ',' << seconds_str(d.time) << '\n';
    }
    write_text(dir / "drops.csv", s.str());
  }
  write_text(dir / "scenario.json", to_json(run.topology).dump(2) + "\n");
}

std::vector<double> delay_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

json summarize(const ExperimentConfig& cfg, std::span<const RunMetrics> runs) {
  const RunAggregate agg = aggregate_runs(runs);
  json s;
  s["schema_version"] = kSchemaVersion;
  s["tool_version"] = kToolVersion;
  s["protocol"] = to_string(cfg.protocol);
  s["node_count"] = cfg.node_count;
  s["runs"] = agg.runs;
  s["mean_table_entries"] = interval_json(agg.mean_table_entries);
  s["median_non_sink_entries"] = interval_json(agg.median_non_sink_entries);
  s["overhead_bytes"] = interval_json(agg.overhead_bytes);
  s["delivery_ratio"] = interval_json(agg.delivery_ratio);

  std::uint64_t generated = 0, delivered = 0, in_flight = 0;
  std::array<std::uint64_t, kDropCauseCount> drops{};
  json per_run = json::array();
  for (const auto& r : runs) {
    generated += r.generated;
    delivered += r.delivered;
    in_flight += r.in_flight;
    json rd;
    for (std::size_t c = 0; c < kDropCauseCount; ++c) {
      drops[c] += r.drops[c];
      rd[std::string(to_string(static_cast<DropCause>(c)))] = r.drops[c];
    }
    per_run.push_back({{"seed", r.seed},
                       {"mean_table_entries", r.mean_table_entries},
                       {"median_non_sink_entries", r.median_non_sink_entries},
                       {"overhead_bytes", r.overhead_bytes},
                       {"overhead_first_half", r.overhead_first_half},
                       {"overhead_second_half", r.overhead_second_half},
                       {"generated", r.generated},
                       {"delivered", r.delivered},
                       {"in_flight", r.in_flight},
                       {"drops", rd}});
  }
  s["generated"] = generated;
  s["delivered"] = delivered;
  s["in_flight"] = in_flight;
  json dj;
  for (std::size_t c = 0; c < kDropCauseCount; ++c) dj[std::string(to_string(static_cast<DropCause>(c)))] = drops[c];
  s["drops"] = dj;

  const auto grid = delay_grid();
  json delay;
  delay["grid_s"] = grid;
  const auto add_cdf = [&](const std::string& name, const std::vector<double>& samples) {
    if (samples.empty()) {
      delay[name] = {{"count", 0}, {"cdf", nullptr}, {"max_s", nullptr}};
      return;
    }
    delay[name] = {{"count", samples.size()},
                   {"cdf", cdf(samples, grid)},
                   {"max_s", *std::max_element(samples.begin(), samples.end())}};
  };
  add_cdf("all", delays_seconds(agg.pooled));
  for (std::uint32_t h = 1; h <= 4; ++h) add_cdf("hops_" + std::to_string(h), delays_seconds(agg.pooled, h));
  std::vector<double> far;
  for (const auto& d : agg.pooled) {
    if (d.hops >= 5) far.push_back(to_seconds(d.delay));
  }
  add_cdf("hops_5plus", far);
  s["delay_cdf"] = delay;

  const HopDistances hd = path_vs_packet_hops(agg.pooled);
  std::vector<double> hop_thresholds;
  for (int h = 1; h <= 10; ++h) hop_thresholds.push_back(h);
  s["hop_thresholds"] = hop_thresholds;
  s["path_hops_cdf"] = hd.path.empty() ? json(nullptr) : json(cdf(hd.path, hop_thresholds));
  s["packet_hops_cdf"] = hd.packet.empty() ? json(nullptr) : json(cdf(hd.packet, hop_thresholds));
  std::size_t over4 = 0;
  for (double h : hd.packet) over4 += h > 4.0 ? 1 : 0;
  s["packets_over_4_hops"] = hd.packet.empty() ? 0.0 : static_cast<double>(over4) / static_cast<double>(hd.packet.size());
  s["per_run"] = per_run;
  return s;
}

ResultBundle run_experiment(const ExperimentConfig& cfg, std::optional<fs::path> out_dir) {
  cfg.validate();
  ResultBundle bundle;
  bundle.dir = resolve_out_dir(cfg, out_dir);
  write_atomically(bundle.dir, [&](const fs::path& staging) {
    for (std::uint64_t seed : cfg.seeds) {
      RunOutput run = run_seed(cfg, seed);
      write_run_files(run, staging / ("seed_" + std::to_string(seed)));
      bundle.runs.push_back(std::move(run.metrics));
    }
    bundle.aggregate = aggregate_runs(bundle.runs);
    bundle.summary = summarize(cfg, bundle.runs);
    json echo = to_json(cfg);
    echo["tool_version"] = kToolVersion;
    write_text(staging / "config.json", echo.dump(2) + "\n");
    write_text(staging / "summary.json", bundle.summary.dump(2) + "\n");
  });
  return bundle;
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  if (name == "nodes") return SweepAxis::nodes;
  if (name == "rht") return SweepAxis::rht;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected nodes or rht)");
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::nodes ? "nodes" : "rht"; }

SweepResult sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values,
                  std::optional<fs::path> out_dir) {
  base.validate();
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  std::vector<ExperimentConfig> points;
  for (double v : values) {
    ExperimentConfig c = base;
    if (axis == SweepAxis::nodes) {
      if (!(v >= 5.0) || v != std::floor(v)) throw ConfigError("node sweep values must be integers >= 5");
      c.node_count = static_cast<std::size_t>(v);
    } else {
      if (!(v > 0.0)) throw ConfigError("rht sweep values must be positive");
      c.rht_seconds = v;
    }
    c.validate();
    points.push_back(c);
  }

  SweepResult result;
  result.dir = resolve_out_dir(base, out_dir);
  fs::create_directories(result.dir);
  std::ostringstream csv;
  csv << "axis_value,protocol,mean_entries,mean_entries_ci95,total_overhead_bytes,total_overhead_ci95\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::ostringstream name;
    name << to_string(axis) << '_' << values[i];
    const fs::path point_dir = result.dir / name.str();
    ResultBundle bundle;
    try {
      bundle = run_experiment(points[i], point_dir);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep point " + name.str() + " failed (config: " + to_json(points[i]).dump() +
                               "): " + e.what());
    }
    SweepRow row{values[i], base.protocol, bundle.aggregate.mean_table_entries, bundle.aggregate.overhead_bytes};
    result.rows.push_back(row);
    const auto ci = [](const Interval& in) { return in.half_width ? fixed6(*in.half_width) : std::string(); };
    csv << values[i] << ',' << to_string(base.protocol) << ',' << fixed6(row.mean_entries.mean) << ','
        << ci(row.mean_entries) << ',' << fixed6(row.overhead_bytes.mean) << ',' << ci(row.overhead_bytes) << '\n';
  }
  write_text(result.dir / "sweep.csv", csv.str());
  return result;
}

}  // namespace llnsim

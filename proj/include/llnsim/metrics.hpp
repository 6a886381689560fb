// Per-run metric collection and cross-run aggregation.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "llnsim/engine.hpp"
#include "llnsim/frame.hpp"
#include "llnsim/routing.hpp"

namespace llnsim {

struct DelaySample {
  std::uint64_t packet_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t hops = 0;
  Duration delay = 0;
  AppKind kind = AppKind::report;
};

/// One routing-control message handed from a routing protocol to the MAC.
struct OverheadSample {
  NodeId node = 0;
  std::string_view kind;
  std::size_t bytes = 0;
  SimTime time = 0;
};

struct TableSample {
  NodeId node = 0;
  SimTime time = 0;
  std::size_t entries = 0;
};

struct DropRecord {
  std::optional<std::uint64_t> packet_id;  // empty for control frames
  NodeId node = 0;
  std::string_view cause;
  SimTime time = 0;
};

class Collector {
public:
  explicit Collector(std::size_t nodes);

  void packet_generated(const DataPacket& packet);
  /// Returns false for a duplicate delivery of the same packet id.
  bool record_delivery(const DelaySample& sample);
  void record_drop(NodeId node, const DataPacket& packet, DropCause cause, SimTime now);
  void record_control_drop(NodeId node, std::string_view cause, SimTime now);
  void record_overhead(const OverheadSample& sample);
  void record_table(NodeId node, SimTime now, std::size_t entries);
  void record_control_event(ControlEvent event) { ++control_events_.at(static_cast<std::size_t>(event)); }
  /// Close the time-weighted table integrals at `end`.
  void finalize(SimTime end);

  const std::vector<DelaySample>& deliveries() const { return deliveries_; }
  const std::vector<OverheadSample>& overhead() const { return overhead_; }
  const std::vector<TableSample>& tables() const { return tables_; }
  const std::vector<DropRecord>& drops() const { return drops_; }

  std::uint64_t generated() const { return generated_; }
  std::uint64_t delivered() const { return deliveries_.size(); }
  std::uint64_t dropped(DropCause cause) const { return drop_counts_.at(static_cast<std::size_t>(cause)); }
  std::uint64_t dropped_total() const;
  std::uint64_t control_events(ControlEvent event) const {
    return control_events_.at(static_cast<std::size_t>(event));
  }
  std::uint64_t control_drops() const { return control_drops_; }

  /// Control bytes handed down in [from, to).
  std::uint64_t overhead_bytes(SimTime from, SimTime to) const;
  std::uint64_t overhead_bytes() const { return overhead_total_; }

  /// Time-weighted mean table size of each node over [0, end]. Requires finalize().
  std::vector<double> node_mean_entries() const;

private:
  struct Integral {
    SimTime last_time = 0;
    std::size_t last_entries = 0;
    double area = 0.0;  // entry-microseconds
  };

  std::uint64_t generated_ = 0;
  std::vector<DelaySample> deliveries_;
  std::unordered_set<std::uint64_t> delivered_ids_;
  std::array<std::uint64_t, kDropCauseCount> drop_counts_{};
  std::array<std::uint64_t, 4> control_events_{};
  std::uint64_t control_drops_ = 0;
  std::vector<DropRecord> drops_;
  std::vector<OverheadSample> overhead_;
  std::uint64_t overhead_total_ = 0;
  std::vector<TableSample> tables_;
  std::vector<Integral> integrals_;
  SimTime end_ = 0;
};

/// Exact empirical CDF: fraction of samples <= each threshold.
/// Throws std::invalid_argument on an empty sample set.
std::vector<double> cdf(std::span<const double> samples, std::span<const double> thresholds);

struct HopDistances {
  std::vector<double> path;    // mean hops per (src, dst) pair
  std::vector<double> packet;  // hops of every delivered packet
};
HopDistances path_vs_packet_hops(std::span<const DelaySample> deliveries);

/// Mean with a two-sided 95 % Student-t half width (n - 1 degrees of freedom).
/// The half width is absent for a single value.
struct Interval {
  double mean = 0.0;
  std::optional<double> half_width;
  std::size_t n = 0;
};
Interval mean_ci95(std::span<const double> values);

double median(std::vector<double> values);

/// Scalar outcome of one seeded run.
struct RunMetrics {
  std::string config_key;  // everything but the seed
  std::uint64_t seed = 0;
  std::vector<DelaySample> deliveries;
  double mean_table_entries = 0.0;
  double median_non_sink_entries = 0.0;
  std::uint64_t overhead_bytes = 0;
  std::uint64_t overhead_first_half = 0;
  std::uint64_t overhead_second_half = 0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_flight = 0;
  std::array<std::uint64_t, kDropCauseCount> drops{};
  std::uint64_t events = 0;
};

struct RunAggregate {
  std::size_t runs = 0;
  Interval mean_table_entries;
  Interval median_non_sink_entries;
  Interval overhead_bytes;
  Interval delivery_ratio;
  /// Pooled over all runs (one CDF, not an average of CDFs).
  std::vector<DelaySample> pooled;
};

/// Throws std::invalid_argument if the runs were produced by different configs.
RunAggregate aggregate_runs(std::span<const RunMetrics> runs);

/// Delays (seconds) of pooled samples, optionally restricted to a hop count.
std::vector<double> delays_seconds(std::span<const DelaySample> samples,
                                   std::optional<std::uint32_t> hops = std::nullopt);

}  // namespace llnsim

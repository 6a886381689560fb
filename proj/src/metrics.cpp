#include "llnsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace llnsim {

Collector::Collector(std::size_t nodes) : integrals_(nodes) {}

void Collector::packet_generated(const DataPacket&) { ++generated_; }

bool Collector::record_delivery(const DelaySample& sample) {
  if (!delivered_ids_.insert(sample.packet_id).second) return false;
  deliveries_.push_back(sample);
  return true;
}

void Collector::record_drop(NodeId node, const DataPacket& packet, DropCause cause, SimTime now) {
  ++drop_counts_.at(static_cast<std::size_t>(cause));
  drops_.push_back(DropRecord{packet.id, node, to_string(cause), now});
}

void Collector::record_control_drop(NodeId node, std::string_view cause, SimTime now) {
  ++control_drops_;
  drops_.push_back(DropRecord{std::nullopt, node, cause, now});
}

void Collector::record_overhead(const OverheadSample& sample) {
  overhead_.push_back(sample);
  overhead_total_ += sample.bytes;
}

void Collector::record_table(NodeId node, SimTime now, std::size_t entries) {
  tables_.push_back(TableSample{node, now, entries});
  Integral& in = integrals_.at(node);
  in.area += static_cast<double>(in.last_entries) * static_cast<double>(now - in.last_time);
  in.last_time = now;
  in.last_entries = entries;
}

void Collector::finalize(SimTime end) {
  for (Integral& in : integrals_) {
    in.area += static_cast<double>(in.last_entries) * static_cast<double>(end - in.last_time);
    in.last_time = end;
  }
  end_ = end;
}

std::uint64_t Collector::dropped_total() const {
  return std::accumulate(drop_counts_.begin(), drop_counts_.end(), std::uint64_t{0});
}

std::uint64_t Collector::overhead_bytes(SimTime from, SimTime to) const {
  std::uint64_t total = 0;
  for (const auto& s : overhead_) {
    if (s.time >= from && s.time < to) total += s.bytes;
  }
  return total;
}

std::vector<double> Collector::node_mean_entries() const {
  std::vector<double> out;
  out.reserve(integrals_.size());
  for (const Integral& in : integrals_) {
    out.push_back(end_ == 0 ? static_cast<double>(in.last_entries) : in.area / static_cast<double>(end_));
  }
  return out;
}

std::vector<double> cdf(std::span<const double> samples, std::span<const double> thresholds) {
  if (samples.empty()) throw std::invalid_argument("cdf of an empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto upto = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    out.push_back(static_cast<double>(upto) / static_cast<double>(sorted.size()));
  }
  return out;
}

HopDistances path_vs_packet_hops(std::span<const DelaySample> deliveries) {
  HopDistances out;
  std::map<std::pair<NodeId, NodeId>, std::pair<double, std::size_t>> per_pair;
  for (const auto& d : deliveries) {
    out.packet.push_back(static_cast<double>(d.hops));
    auto& acc = per_pair[{d.src, d.dst}];
    acc.first += d.hops;
    ++acc.second;
  }
  for (const auto& [pair, acc] : per_pair) {
    out.path.push_back(acc.first / static_cast<double>(acc.second));
  }
  return out;
}

Interval mean_ci95(std::span<const double> values) {
  Interval out;
  out.n = values.size();
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double n = static_cast<double>(values.size());
  const double s = std::sqrt(ss / (n - 1.0));
  boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  out.half_width = t * s / std::sqrt(n);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

RunAggregate aggregate_runs(std::span<const RunMetrics> runs) {
  RunAggregate agg;
  agg.runs = runs.size();
  if (runs.empty()) return agg;
  for (const auto& r : runs) {
    if (r.config_key != runs.front().config_key) {
      throw std::invalid_argument("aggregate_runs: runs come from different configurations");
    }
  }
  std::vector<double> entries, medians, overhead, ratio;
  for (const auto& r : runs) {
    entries.push_back(r.mean_table_entries);
    medians.push_back(r.median_non_sink_entries);
    overhead.push_back(static_cast<double>(r.overhead_bytes));
    ratio.push_back(r.generated == 0 ? 0.0 : static_cast<double>(r.delivered) / static_cast<double>(r.generated));
    agg.pooled.insert(agg.pooled.end(), r.deliveries.begin(), r.deliveries.end());
  }
  agg.mean_table_entries = mean_ci95(entries);
  agg.median_non_sink_entries = mean_ci95(medians);
  agg.overhead_bytes = mean_ci95(overhead);
  agg.delivery_ratio = mean_ci95(ratio);
  return agg;
}

std::vector<double> delays_seconds(std::span<const DelaySample> samples, std::optional<std::uint32_t> hops) {
  std::vector<double> out;
  for (const auto& s : samples) {
    if (!hops || s.hops == *hops) out.push_back(to_seconds(s.delay));
  }
  return out;
}

}  // namespace llnsim

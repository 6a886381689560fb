// LOADng: reactive route discovery with RREQ flooding and RREP unicast.
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "llnsim/engine.hpp"
#include "llnsim/frame.hpp"
#include "llnsim/routing.hpp"

namespace llnsim {

struct LoadngConfig {
  Duration route_hold_time = seconds(600);
  Duration net_traversal_time = seconds(10);
  std::size_t rreq_bytes = 22;
  std::size_t rrep_bytes = 22;
  std::size_t buffer_capacity = 2;
  /// Route entries held by a non-sink node; the oldest is evicted on overflow.
  std::size_t route_capacity = 20;
};

enum class RouteOrigin : std::uint8_t { reverse_from_rreq, forward_from_rrep };

struct LoadngRouteEntry {
  NodeId destination = 0;
  NodeId next_hop = 0;
  std::uint32_t metric = 0;  // hop count
  SimTime installed_at = 0;
  Duration hold_time = 0;
  RouteOrigin origin = RouteOrigin::reverse_from_rreq;

  bool valid_at(SimTime now) const { return now - installed_at <= hold_time; }
};

class LoadngRouter final : public Router {
public:
  LoadngRouter(NodeId self, bool is_sink, RouterHost& host, LoadngConfig cfg);

  void start() override {}
  /// Forward on a valid route, otherwise buffer the packet and flood an RREQ.
  void send(const DataPacket& packet) override;
  void on_frame(const Frame& frame, NodeId from) override;
  std::size_t table_size() const override { return table_.size(); }
  std::optional<NodeId> next_hop(NodeId dst) const override;
  std::size_t buffered_packets() const override { return buffer_.size(); }

  void on_rreq(const LoadngMessage& rreq, NodeId from);
  void on_rrep(const LoadngMessage& rrep, NodeId from);
  /// Drop every entry older than its hold time. Returns the removed entries.
  std::vector<LoadngRouteEntry> expire_routes(SimTime now);
  /// Deadline of a discovery: drop what is still buffered for `dest`.
  void discovery_timeout(NodeId dest);

  const std::map<NodeId, LoadngRouteEntry>& routes() const { return table_; }
  std::optional<LoadngRouteEntry> route(NodeId dst) const;
  bool discovery_pending(NodeId dest) const { return pending_.contains(dest); }
  const std::deque<DataPacket>& buffer() const { return buffer_; }
  std::uint32_t sequence() const { return seq_; }
  std::uint64_t rreqs_forwarded() const { return rreqs_forwarded_; }
  std::uint64_t rreps_sent() const { return rreps_sent_; }

private:
  /// Install or refresh a route when there is no valid entry or the metric is
  /// strictly better. Returns true if the table changed.
  bool install(NodeId dest, NodeId next_hop, std::uint32_t metric, RouteOrigin origin);
  void remove(NodeId dest);
  void start_discovery(NodeId dest);
  void forward_data(const DataPacket& packet);

  NodeId self_;
  bool sink_;
  RouterHost& host_;
  LoadngConfig cfg_;
  std::uint32_t seq_ = 0;
  std::map<NodeId, LoadngRouteEntry> table_;
  std::map<NodeId, EventHandle> expiry_;
  std::map<std::pair<NodeId, std::uint32_t>, std::uint32_t> seen_;
  std::map<NodeId, EventHandle> pending_;
  std::deque<DataPacket> buffer_;
  std::uint64_t rreqs_forwarded_ = 0;
  std::uint64_t rreps_sent_ = 0;
};

}  // namespace llnsim

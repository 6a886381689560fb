// Contract between the routing protocols and the node/network that hosts them.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "llnsim/engine.hpp"
#include "llnsim/frame.hpp"
#include "llnsim/rng.hpp"

namespace llnsim {

/// Why a data packet left the network without being delivered.
enum class DropCause : std::uint8_t {
  queue,              // MAC queue full
  csma,               // channel access or link attempts exhausted
  discovery_timeout,  // no RREP before the net traversal deadline
  buffer_overflow,    // evicted from the discovery buffer
  no_route,           // forwarding node had no usable route
  hop_limit,          // exceeded the hop limit
};
inline constexpr std::size_t kDropCauseCount = 6;
std::string_view to_string(DropCause cause);

/// Protocol-level events that are counted but are not data drops.
enum class ControlEvent : std::uint8_t {
  malformed_dio,
  rrep_no_route,
  table_eviction,
  discovery_started,
};
std::string_view to_string(ControlEvent event);

/// Services a router needs from its host. Implemented by Network, and by
/// lightweight fakes in unit tests.
class RouterHost {
public:
  virtual ~RouterHost() = default;
  virtual Simulator& sim() = 0;
  /// Hand a control message to the MAC; counted as control overhead whether or
  /// not the MAC queue accepts it.
  virtual bool send_control(NodeId self, NodeId link_dst, Payload message, std::size_t bytes) = 0;
  virtual bool send_data(NodeId self, NodeId next_hop, const DataPacket& packet) = 0;
  virtual void deliver(NodeId self, const DataPacket& packet) = 0;
  virtual void drop(NodeId self, const DataPacket& packet, DropCause cause) = 0;
  virtual void table_changed(NodeId self, std::size_t entries) = 0;
  virtual void control_event(NodeId self, ControlEvent event) = 0;
};

/// Per-node routing protocol instance.
class Router {
public:
  virtual ~Router() = default;
  virtual void start() = 0;
  /// Packet handed down by the local application.
  virtual void send(const DataPacket& packet) = 0;
  /// Control message or data frame received from a neighbor.
  virtual void on_frame(const Frame& frame, NodeId from) = 0;
  /// Number of route entries currently held.
  virtual std::size_t table_size() const = 0;
  /// Next hop that would be used for `dst` right now, if any.
  virtual std::optional<NodeId> next_hop(NodeId dst) const = 0;
  /// Data packets parked inside the router (discovery buffers).
  virtual std::size_t buffered_packets() const { return 0; }
};

/// Common receive path for data frames: count the hop, deliver locally, or
/// enforce the hop limit. Returns the packet when it must be forwarded.
std::optional<DataPacket> accept_data_frame(RouterHost& host, NodeId self, const Frame& frame);

}  // namespace llnsim

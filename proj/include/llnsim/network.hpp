// One simulated house network: medium, per-node MAC + router, application traffic.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "llnsim/engine.hpp"
#include "llnsim/loadng.hpp"
#include "llnsim/mac.hpp"
#include "llnsim/metrics.hpp"
#include "llnsim/radio.hpp"
#include "llnsim/rng.hpp"
#include "llnsim/routing.hpp"
#include "llnsim/rpl.hpp"
#include "llnsim/scenario.hpp"

namespace llnsim {

enum class Protocol : std::uint8_t { rpl, loadng };
std::string_view to_string(Protocol protocol);
Protocol protocol_from_string(std::string_view name);

struct SimConfig {
  Protocol protocol = Protocol::rpl;
  RadioConfig radio;
  MacConfig mac;
  RplConfig rpl;
  LoadngConfig loadng;
  TrafficConfig traffic;
  SimTime horizon = kDefaultHorizon;
  std::uint64_t seed = 1;
  Duration table_sample_period = seconds(60);
  std::uint32_t hop_limit = 64;
  /// When false only routing runs; packets come from originate().
  bool traffic_enabled = true;
};

class Network final : public MacListener, public RouterHost {
public:
  Network(Topology topology, SimConfig cfg);
  ~Network() override;

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Bootstrap routers, traffic processes and the table sampler. Idempotent.
  void start();
  void run_until(SimTime t);
  /// start(), run to the horizon and summarise.
  RunMetrics run();

  /// Hand a new application packet to the routing layer of `src`.
  std::uint64_t originate(NodeId src, NodeId dst, AppKind kind);

  Simulator& sim() override { return sim_; }
  const SimConfig& config() const { return cfg_; }
  const Topology& topology() const { return topology_; }
  const Medium& medium() const { return medium_; }
  Mac& mac(NodeId node) { return *macs_.at(node); }
  Router& router(NodeId node) { return *routers_.at(node); }
  const Router& router(NodeId node) const { return *routers_.at(node); }
  RplRouter& rpl(NodeId node);
  LoadngRouter& loadng(NodeId node);
  Collector& collector() { return collector_; }
  NodeId sink() const { return sink_; }
  std::size_t size() const { return topology_.size(); }

  /// Data packets still inside the network (MAC queues and discovery buffers).
  std::uint64_t in_flight() const;
  /// Ordered pairs (a, b) where a holds a route to b but b holds none to a.
  std::size_t unidirectional_pairs() const;

  /// Called for every control message a router hands to the MAC.
  using ControlObserver = std::function<void(SimTime, NodeId, const Payload&, NodeId link_dst)>;
  void set_control_observer(ControlObserver fn) { control_observer_ = std::move(fn); }
  using DeliveryObserver = std::function<void(SimTime, NodeId, const DataPacket&)>;
  void set_delivery_observer(DeliveryObserver fn) { delivery_observer_ = std::move(fn); }
  using OriginObserver = std::function<void(SimTime, const DataPacket&)>;
  /// Called for every packet the application layer creates.
  void set_origin_observer(OriginObserver fn) { origin_observer_ = std::move(fn); }
  using SampleObserver = std::function<void(SimTime)>;
  /// Called at each periodic table sample.
  void set_sample_observer(SampleObserver fn) { sample_observer_ = std::move(fn); }
  void set_trace(std::ostream* out) { sim_.set_trace(out); }

  // RouterHost
  bool send_control(NodeId self, NodeId link_dst, Payload message, std::size_t bytes) override;
  bool send_data(NodeId self, NodeId next_hop, const DataPacket& packet) override;
  void deliver(NodeId self, const DataPacket& packet) override;
  void drop(NodeId self, const DataPacket& packet, DropCause cause) override;
  void table_changed(NodeId self, std::size_t entries) override;
  void control_event(NodeId self, ControlEvent event) override;

  // MacListener
  void on_frame(NodeId receiver, const Frame& frame, NodeId from) override;
  void on_mac_drop(NodeId node, const Frame& frame, MacDropCause cause) override;

private:
  void schedule_report(NodeId node);
  void schedule_event_process();
  void schedule_burst_process();
  void send_burst();
  void sample_tables();

  Topology topology_;
  SimConfig cfg_;
  Simulator sim_;
  Medium medium_;
  Collector collector_;
  std::vector<std::unique_ptr<Mac>> macs_;
  std::vector<std::unique_ptr<Router>> routers_;
  std::vector<RngStream> traffic_rng_;
  RngStream event_rng_;
  RngStream burst_rng_;
  NodeId sink_ = 0;
  std::vector<NodeId> actuators_;
  std::vector<NodeId> event_sensors_;
  std::uint64_t next_packet_id_ = 1;
  bool started_ = false;
  ControlObserver control_observer_;
  DeliveryObserver delivery_observer_;
  OriginObserver origin_observer_;
  SampleObserver sample_observer_;
};

}  // namespace llnsim

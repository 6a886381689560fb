#include "llnsim/network.hpp"

#include <stdexcept>
#include <string>

namespace llnsim {

std::string_view to_string(Protocol protocol) { return protocol == Protocol::rpl ? "rpl" : "loadng"; }

Protocol protocol_from_string(std::string_view name) {
  if (name == "rpl") return Protocol::rpl;
  if (name == "loadng") return Protocol::loadng;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

Network::Network(Topology topology, SimConfig cfg)
    : topology_(std::move(topology)),
      cfg_(cfg),
      medium_(sim_, topology_.positions, cfg.radio, cfg.seed),
      collector_(topology_.size()),
      event_rng_(cfg.seed, 0, StreamPurpose::events),
      burst_rng_(cfg.seed, 0, StreamPurpose::bursts) {
  sink_ = topology_.sink();
  actuators_ = topology_.with_role(NodeRole::actuator);
  event_sensors_ = topology_.with_role(NodeRole::event_sensor);
  for (NodeId i = 0; i < topology_.size(); ++i) {
    macs_.push_back(std::make_unique<Mac>(i, sim_, medium_, cfg_.mac, *this, cfg_.seed));
    if (cfg_.protocol == Protocol::rpl) {
      routers_.push_back(std::make_unique<RplRouter>(i, i == sink_, *this, cfg_.rpl, cfg_.seed));
    } else {
      routers_.push_back(std::make_unique<LoadngRouter>(i, i == sink_, *this, cfg_.loadng));
    }
    traffic_rng_.emplace_back(cfg_.seed, i, StreamPurpose::traffic);
  }
}

Network::~Network() = default;

RplRouter& Network::rpl(NodeId node) {
  auto* r = dynamic_cast<RplRouter*>(routers_.at(node).get());
  if (r == nullptr) throw std::logic_error("network is not running RPL");
  return *r;
}

LoadngRouter& Network::loadng(NodeId node) {
  auto* r = dynamic_cast<LoadngRouter*>(routers_.at(node).get());
  if (r == nullptr) throw std::logic_error("network is not running LOADng");
  return *r;
}

void Network::start() {
  if (started_) return;
  started_ = true;
  for (NodeId i = 0; i < size(); ++i) collector_.record_table(i, sim_.now(), routers_[i]->table_size());
  for (auto& r : routers_) r->start();
  sim_.schedule_in(cfg_.table_sample_period, kMediumTarget, "table_sample", [this] { sample_tables(); });
  if (!cfg_.traffic_enabled) return;
  for (NodeId i = 0; i < size(); ++i) {
    const NodeRole role = topology_.roles[i];
    if (role == NodeRole::monitoring_sensor || role == NodeRole::actuator) schedule_report(i);
  }
  if (!event_sensors_.empty()) schedule_event_process();
  if (!actuators_.empty()) schedule_burst_process();
}

void Network::run_until(SimTime t) {
  start();
  sim_.run_until(t);
}

RunMetrics Network::run() {
  run_until(cfg_.horizon);
  collector_.finalize(sim_.now());

  RunMetrics m;
  m.seed = cfg_.seed;
  m.deliveries = collector_.deliveries();
  const auto per_node = collector_.node_mean_entries();
  double sum = 0.0;
  std::vector<double> non_sink;
  for (NodeId i = 0; i < per_node.size(); ++i) {
    sum += per_node[i];
    if (i != sink_) non_sink.push_back(per_node[i]);
  }
  m.mean_table_entries = per_node.empty() ? 0.0 : sum / static_cast<double>(per_node.size());
  m.median_non_sink_entries = median(non_sink);
  m.overhead_bytes = collector_.overhead_bytes();
  m.overhead_first_half = collector_.overhead_bytes(0, cfg_.horizon / 2);
  m.overhead_second_half = collector_.overhead_bytes(cfg_.horizon / 2, cfg_.horizon + 1);
  m.generated = collector_.generated();
  m.delivered = collector_.delivered();
  m.in_flight = in_flight();
  for (std::size_t c = 0; c < kDropCauseCount; ++c) m.drops[c] = collector_.dropped(static_cast<DropCause>(c));
  m.events = sim_.events_processed();
  return m;
}

std::uint64_t Network::originate(NodeId src, NodeId dst, AppKind kind) {
  DataPacket p;
  p.id = next_packet_id_++;
  p.src = src;
  p.dst = dst;
  p.kind = kind;
  p.payload_bytes = cfg_.traffic.payload_bytes;
  p.created_at = sim_.now();
  p.hops = 0;
  p.hop_limit = cfg_.hop_limit;
  collector_.packet_generated(p);
  if (origin_observer_) origin_observer_(p.created_at, p);
  routers_.at(src)->send(p);
  return p.id;
}

void Network::schedule_report(NodeId node) {
  const Duration gap = next_report_interval(cfg_.traffic, traffic_rng_[node]);
  sim_.schedule_in(gap, node, "app_report", [this, node] {
    const AppKind kind =
        topology_.roles[node] == NodeRole::actuator ? AppKind::actuator_report : AppKind::report;
    originate(node, sink_, kind);
    schedule_report(node);
  });
}

void Network::schedule_event_process() {
  const Duration gap = next_poisson_gap(cfg_.traffic.event_rate_per_hour, event_rng_);
  sim_.schedule_in(gap, kMediumTarget, "app_event", [this] {
    const NodeId who = event_sensors_[event_rng_.uniform_int(0, event_sensors_.size() - 1)];
    originate(who, sink_, AppKind::event);
    schedule_event_process();
  });
}

void Network::schedule_burst_process() {
  const Duration gap = next_poisson_gap(cfg_.traffic.burst_rate_per_hour, burst_rng_);
  sim_.schedule_in(gap, sink_, "app_burst", [this] {
    send_burst();
    schedule_burst_process();
  });
}

void Network::send_burst() {
  for (NodeId target : pick_burst_targets(actuators_, cfg_.traffic.burst_size, burst_rng_)) {
    originate(sink_, target, AppKind::command);
  }
}

void Network::sample_tables() {
  for (NodeId i = 0; i < size(); ++i) collector_.record_table(i, sim_.now(), routers_[i]->table_size());
  if (sample_observer_) sample_observer_(sim_.now());
  sim_.schedule_in(cfg_.table_sample_period, kMediumTarget, "table_sample", [this] { sample_tables(); });
}

std::uint64_t Network::in_flight() const {
  std::uint64_t n = 0;
  for (const auto& mac : macs_) {
    for (const Frame& f : mac->queue()) n += f.is_data() ? 1 : 0;
  }
  for (const auto& r : routers_) n += r->buffered_packets();
  return n;
}

std::size_t Network::unidirectional_pairs() const {
  std::size_t count = 0;
  for (NodeId a = 0; a < size(); ++a) {
    for (NodeId b = 0; b < size(); ++b) {
      if (a == b) continue;
      if (routers_[a]->next_hop(b) && !routers_[b]->next_hop(a)) ++count;
    }
  }
  return count;
}

bool Network::send_control(NodeId self, NodeId link_dst, Payload message, std::size_t bytes) {
  const std::string_view kind = control_name(message);
  collector_.record_overhead(OverheadSample{self, kind, bytes, sim_.now()});
  if (control_observer_) control_observer_(sim_.now(), self, message, link_dst);
  Frame f;
  f.dst = link_dst;
  f.payload = std::move(message);
  f.payload_bytes = bytes;
  return macs_.at(self)->send(std::move(f));
}

bool Network::send_data(NodeId self, NodeId next_hop, const DataPacket& packet) {
  Frame f;
  f.dst = next_hop;
  f.payload = packet;
  f.payload_bytes = packet.payload_bytes;
  return macs_.at(self)->send(std::move(f));
}

void Network::deliver(NodeId self, const DataPacket& packet) {
  const bool first = collector_.record_delivery(
      DelaySample{packet.id, packet.src, packet.dst, packet.hops, sim_.now() - packet.created_at, packet.kind});
  if (!first) return;
  if (delivery_observer_) delivery_observer_(sim_.now(), self, packet);
  if (packet.kind == AppKind::app_ack) return;
  originate(self, packet.src, AppKind::app_ack);
  if (self == sink_ && packet.kind == AppKind::event && cfg_.traffic_enabled) send_burst();
}

void Network::drop(NodeId self, const DataPacket& packet, DropCause cause) {
  collector_.record_drop(self, packet, cause, sim_.now());
}

void Network::table_changed(NodeId self, std::size_t entries) {
  collector_.record_table(self, sim_.now(), entries);
}

void Network::control_event(NodeId, ControlEvent event) { collector_.record_control_event(event); }

void Network::on_frame(NodeId receiver, const Frame& frame, NodeId from) {
  if (!frame.broadcast() && frame.dst != receiver) return;
  routers_.at(receiver)->on_frame(frame, from);
}

void Network::on_mac_drop(NodeId node, const Frame& frame, MacDropCause cause) {
  if (const auto* p = std::get_if<DataPacket>(&frame.payload)) {
    collector_.record_drop(node, *p, cause == MacDropCause::queue ? DropCause::queue : DropCause::csma, sim_.now());
  } else {
    collector_.record_control_drop(node, cause == MacDropCause::queue ? "control_queue" : "control_csma", sim_.now());
  }
}

}  // namespace llnsim

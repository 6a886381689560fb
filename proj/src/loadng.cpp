#include "llnsim/loadng.hpp"

#include <algorithm>

namespace llnsim {

LoadngRouter::LoadngRouter(NodeId self, bool is_sink, RouterHost& host, LoadngConfig cfg)
    : self_(self), sink_(is_sink), host_(host), cfg_(cfg) {}

std::optional<LoadngRouteEntry> LoadngRouter::route(NodeId dst) const {
  auto it = table_.find(dst);
  if (it == table_.end() || !it->second.valid_at(host_.sim().now())) return std::nullopt;
  return it->second;
}

std::optional<NodeId> LoadngRouter::next_hop(NodeId dst) const {
  if (auto r = route(dst)) return r->next_hop;
  return std::nullopt;
}

bool LoadngRouter::install(NodeId dest, NodeId next_hop, std::uint32_t metric, RouteOrigin origin) {
  if (dest == self_) return false;
  Simulator& sim = host_.sim();
  const SimTime now = sim.now();
  auto it = table_.find(dest);
  const bool existing = it != table_.end() && it->second.valid_at(now);
  if (existing && metric >= it->second.metric) return false;

  if (it == table_.end() && !sink_ && table_.size() >= cfg_.route_capacity) {
    auto oldest = std::min_element(table_.begin(), table_.end(), [](const auto& a, const auto& b) {
      return a.second.installed_at < b.second.installed_at;
    });
    const NodeId victim = oldest->first;
    sim.cancel(expiry_[victim]);
    expiry_.erase(victim);
    table_.erase(oldest);
    host_.control_event(self_, ControlEvent::table_eviction);
  }

  table_[dest] = LoadngRouteEntry{dest, next_hop, metric, now, cfg_.route_hold_time, origin};
  sim.cancel(expiry_[dest]);
  // Invalid once now - installed_at > hold_time.
  expiry_[dest] = sim.schedule_in(cfg_.route_hold_time + 1, self_, "route_expiry", [this, dest] {
    expiry_.erase(dest);
    remove(dest);
  });
  host_.table_changed(self_, table_.size());
  return true;
}

void LoadngRouter::remove(NodeId dest) {
  if (table_.erase(dest) > 0) host_.table_changed(self_, table_.size());
}

std::vector<LoadngRouteEntry> LoadngRouter::expire_routes(SimTime now) {
  std::vector<LoadngRouteEntry> removed;
  for (auto it = table_.begin(); it != table_.end();) {
    if (!it->second.valid_at(now)) {
      removed.push_back(it->second);
      if (auto e = expiry_.find(it->first); e != expiry_.end()) {
        host_.sim().cancel(e->second);
        expiry_.erase(e);
      }
      it = table_.erase(it);
    } else {
      ++it;
    }
  }
  if (!removed.empty()) host_.table_changed(self_, table_.size());
  return removed;
}

void LoadngRouter::send(const DataPacket& packet) {
  if (auto next = next_hop(packet.dst)) {
    host_.send_data(self_, *next, packet);
    return;
  }
  if (buffer_.size() >= cfg_.buffer_capacity) {
    DataPacket oldest = buffer_.front();
    buffer_.pop_front();
    host_.drop(self_, oldest, DropCause::buffer_overflow);
  }
  buffer_.push_back(packet);
  if (!pending_.contains(packet.dst)) start_discovery(packet.dst);
}

void LoadngRouter::start_discovery(NodeId dest) {
  ++seq_;
  seen_[{self_, seq_}] = 0;
  host_.control_event(self_, ControlEvent::discovery_started);
  pending_[dest] = host_.sim().schedule_in(cfg_.net_traversal_time, self_, "discovery_deadline",
                                           [this, dest] { discovery_timeout(dest); });
  LoadngMessage rreq;
  rreq.kind = LoadngMessage::Kind::rreq;
  rreq.originator = self_;
  rreq.destination = dest;
  rreq.seq = seq_;
  rreq.hop_count = 0;
  host_.send_control(self_, kBroadcast, rreq, cfg_.rreq_bytes);
}

void LoadngRouter::discovery_timeout(NodeId dest) {
  if (auto it = pending_.find(dest); it != pending_.end()) {
    host_.sim().cancel(it->second);
    pending_.erase(it);
  }
  std::deque<DataPacket> keep;
  for (const DataPacket& p : buffer_) {
    if (p.dst == dest) {
      host_.drop(self_, p, DropCause::discovery_timeout);
    } else {
      keep.push_back(p);
    }
  }
  buffer_ = std::move(keep);
}

void LoadngRouter::on_rreq(const LoadngMessage& rreq, NodeId from) {
  if (rreq.originator == self_) return;
  const std::uint32_t metric = rreq.hop_count + 1;
  install(rreq.originator, from, metric, RouteOrigin::reverse_from_rreq);

  const auto key = std::make_pair(rreq.originator, rreq.seq);
  auto seen = seen_.find(key);
  if (seen != seen_.end() && metric >= seen->second) return;
  seen_[key] = metric;

  if (rreq.destination == self_) {
    const auto back = next_hop(rreq.originator);
    if (!back) {
      host_.control_event(self_, ControlEvent::rrep_no_route);
      return;
    }
    LoadngMessage rrep;
    rrep.kind = LoadngMessage::Kind::rrep;
    rrep.originator = self_;
    rrep.destination = rreq.originator;
    rrep.seq = rreq.seq;
    rrep.hop_count = 0;
    ++rreps_sent_;
    host_.send_control(self_, *back, rrep, cfg_.rrep_bytes);
    return;
  }

  LoadngMessage fwd = rreq;
  fwd.hop_count = metric;
  ++rreqs_forwarded_;
  host_.send_control(self_, kBroadcast, fwd, cfg_.rreq_bytes);
}

void LoadngRouter::on_rrep(const LoadngMessage& rrep, NodeId from) {
  const std::uint32_t metric = rrep.hop_count + 1;
  install(rrep.originator, from, metric, RouteOrigin::forward_from_rrep);

  if (rrep.destination == self_) {
    auto it = pending_.find(rrep.originator);
    if (it == pending_.end()) return;  // later RREP: only the table is updated
    host_.sim().cancel(it->second);
    pending_.erase(it);
    std::deque<DataPacket> keep;
    std::vector<DataPacket> ready;
    for (const DataPacket& p : buffer_) {
      if (p.dst == rrep.originator) {
        ready.push_back(p);
      } else {
        keep.push_back(p);
      }
    }
    buffer_ = std::move(keep);
    for (const DataPacket& p : ready) forward_data(p);
    return;
  }

  const auto back = next_hop(rrep.destination);
  if (!back) {
    host_.control_event(self_, ControlEvent::rrep_no_route);
    return;
  }
  LoadngMessage fwd = rrep;
  fwd.hop_count = metric;
  host_.send_control(self_, *back, fwd, cfg_.rrep_bytes);
}

void LoadngRouter::forward_data(const DataPacket& packet) {
  if (auto next = next_hop(packet.dst)) {
    host_.send_data(self_, *next, packet);
  } else {
    host_.drop(self_, packet, DropCause::no_route);
  }
}

void LoadngRouter::on_frame(const Frame& frame, NodeId from) {
  if (const auto* msg = std::get_if<LoadngMessage>(&frame.payload)) {
    if (msg->kind == LoadngMessage::Kind::rreq) {
      on_rreq(*msg, from);
    } else {
      on_rrep(*msg, from);
    }
    return;
  }
  if (frame.is_data()) {
    if (auto packet = accept_data_frame(host_, self_, frame)) forward_data(*packet);
  }
}

}  // namespace llnsim

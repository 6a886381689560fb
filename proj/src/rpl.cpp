#include "llnsim/rpl.hpp"

#include <algorithm>
#include <limits>

namespace llnsim {

void TrickleTimer::begin(Duration interval, RngStream& rng) {
  interval_ = std::clamp(interval, imin_, imax_);
  counter_ = 0;
  fire_point_ = rng.uniform_duration(interval_ / 2, interval_);
}

bool TrickleTimer::reset(RngStream& rng) {
  if (interval_ <= imin_) return false;
  begin(imin_, rng);
  return true;
}

RplRouter::RplRouter(NodeId self, bool is_root, RouterHost& host, RplConfig cfg, std::uint64_t seed)
    : self_(self),
      root_(is_root),
      host_(host),
      cfg_(cfg),
      rng_(seed, self, StreamPurpose::trickle),
      trickle_(cfg.dio_min, cfg.dio_max, cfg.redundancy_k) {
  if (root_) rank_ = cfg_.min_hop_rank_increase;
}

void RplRouter::start() {
  if (started_) return;
  started_ = true;
  if (root_) {
    start_trickle(cfg_.dio_min);
  } else {
    schedule_dis();
  }
}

std::size_t RplRouter::table_size() const {
  return downward_.size() + (parent_ ? 1 : 0);
}

void RplRouter::start_trickle(Duration interval) {
  trickle_.begin(interval, rng_);
  schedule_trickle_events();
}

void RplRouter::schedule_trickle_events() {
  Simulator& sim = host_.sim();
  sim.cancel(fire_event_);
  sim.cancel(expire_event_);
  interval_start_ = sim.now();
  fire_event_ = sim.schedule_in(trickle_.fire_point(), self_, "trickle_fire", [this] { on_trickle_fire(); });
  expire_event_ = sim.schedule_in(trickle_.interval(), self_, "trickle_end", [this] { on_trickle_expire(); });
}

void RplRouter::on_trickle_fire() {
  if (trickle_.should_transmit()) {
    send_dio(kBroadcast);
  } else {
    ++dios_suppressed_;
  }
  // DAO refresh rides on the node's own DIO timer.
  if (!root_) emit_dao();
}

void RplRouter::on_trickle_expire() {
  trickle_.expire(rng_);
  schedule_trickle_events();
}

void RplRouter::send_dio(NodeId link_dst) {
  RplMessage dio;
  dio.kind = RplMessage::Kind::dio;
  dio.sender = self_;
  dio.rank = rank_;
  ++dios_sent_;
  host_.send_control(self_, link_dst, dio, cfg_.dio_bytes);
}

void RplRouter::schedule_dis() {
  dis_event_ = host_.sim().schedule_in(cfg_.dis_period, self_, "dis_timer", [this] {
    if (joined()) return;
    RplMessage dis;
    dis.kind = RplMessage::Kind::dis;
    dis.sender = self_;
    host_.send_control(self_, kBroadcast, dis, cfg_.dis_bytes);
    schedule_dis();
  });
}

void RplRouter::remember_candidate(NodeId from, std::uint32_t rank) {
  auto it = candidates_.find(from);
  if (it != candidates_.end()) {
    it->second = rank;
    return;
  }
  if (candidates_.size() < cfg_.neighbor_table_cap) {
    candidates_.emplace(from, rank);
    return;
  }
  // Full: replace the worst non-parent entry if the newcomer advertises better.
  auto worst = candidates_.end();
  for (auto c = candidates_.begin(); c != candidates_.end(); ++c) {
    if (parent_ && c->first == *parent_) continue;
    if (worst == candidates_.end() || c->second >= worst->second) worst = c;
  }
  if (worst != candidates_.end() && rank < worst->second) {
    candidates_.erase(worst);
    candidates_.emplace(from, rank);
  }
}

void RplRouter::on_dio(const RplMessage& dio, NodeId from) {
  if (dio.rank < cfg_.min_hop_rank_increase || dio.rank >= kInfiniteRank) {
    host_.control_event(self_, ControlEvent::malformed_dio);
    return;
  }
  if (root_) {
    trickle_.hear_consistent();
    return;
  }

  remember_candidate(from, dio.rank);

  std::optional<NodeId> best;
  std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
  for (const auto& [id, rank] : candidates_) {
    const std::uint32_t path_rank = rank + cfg_.min_hop_rank_increase;
    if (path_rank < best_rank) {  // map order gives lowest id on ties
      best = id;
      best_rank = path_rank;
    }
  }
  if (!best || best_rank >= kInfiniteRank) {
    trickle_.hear_consistent();
    return;
  }

  const bool was_joined = joined();
  const bool changed = parent_ != best || rank_ != best_rank;
  if (!changed) {
    trickle_.hear_consistent();
    return;
  }

  if (parent_ != best) ++parent_changes_;
  parent_ = best;
  rank_ = best_rank;
  host_.table_changed(self_, table_size());

  if (!was_joined) {
    host_.sim().cancel(dis_event_);
    start_trickle(cfg_.dio_min);
  } else if (trickle_.reset(rng_)) {
    schedule_trickle_events();
  }
  emit_dao();
}

void RplRouter::on_dis(NodeId from) {
  if (!joined()) return;
  send_dio(from);
}

void RplRouter::emit_dao() {
  if (root_ || !parent_) return;
  RplMessage dao;
  dao.kind = RplMessage::Kind::dao;
  dao.sender = self_;
  dao.target = self_;
  dao.lifetime_s = cfg_.dao_lifetime_s;
  ++daos_sent_;
  host_.send_control(self_, *parent_, dao, cfg_.dao_bytes);
}

void RplRouter::install_downward(NodeId target, NodeId via) {
  const SimTime now = host_.sim().now();
  auto it = downward_.find(target);
  if (it != downward_.end()) {
    it->second = DownwardRoute{via, now};
    return;
  }
  if (!root_ && downward_.size() >= cfg_.route_capacity) {
    auto oldest = std::min_element(downward_.begin(), downward_.end(), [](const auto& a, const auto& b) {
      return a.second.installed_at < b.second.installed_at;
    });
    downward_.erase(oldest);
    host_.control_event(self_, ControlEvent::table_eviction);
  }
  downward_.emplace(target, DownwardRoute{via, now});
  host_.table_changed(self_, table_size());
}

void RplRouter::on_dao(const RplMessage& dao, NodeId from) {
  if (!joined() || dao.target == self_) return;
  install_downward(dao.target, from);
  if (!root_) {
    RplMessage up = dao;
    up.sender = self_;
    host_.send_control(self_, *parent_, up, cfg_.dao_bytes);
  }
}

std::optional<NodeId> RplRouter::forward_next_hop(NodeId dst) const {
  if (auto it = downward_.find(dst); it != downward_.end()) return it->second.next_hop;
  return parent_;
}

void RplRouter::send(const DataPacket& packet) {
  const auto next = joined() ? forward_next_hop(packet.dst) : std::nullopt;
  if (!next) {
    host_.drop(self_, packet, DropCause::no_route);
    return;
  }
  host_.send_data(self_, *next, packet);
}

void RplRouter::on_frame(const Frame& frame, NodeId from) {
  if (const auto* msg = std::get_if<RplMessage>(&frame.payload)) {
    switch (msg->kind) {
      case RplMessage::Kind::dio: on_dio(*msg, from); break;
      case RplMessage::Kind::dis: on_dis(from); break;
      case RplMessage::Kind::dao: on_dao(*msg, from); break;
    }
    return;
  }
  if (frame.is_data()) {
    if (auto packet = accept_data_frame(host_, self_, frame)) send(*packet);
  }
}

}  // namespace llnsim

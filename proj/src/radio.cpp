#include "llnsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace llnsim {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

Duration airtime(const RadioConfig& cfg, std::size_t bytes) {
  return cfg.preamble_us + cfg.us_per_byte * bytes;
}

double reception_probability(const RadioConfig& cfg, double distance_m) {
  if (distance_m > cfg.range_m) return 0.0;
  const double r = distance_m / cfg.range_m;
  return std::clamp(1.0 - cfg.loss_factor * r * r, 0.0, 1.0);
}

std::vector<std::vector<NodeId>> unit_disk_graph(std::span<const Position> positions, double range_m) {
  std::vector<std::vector<NodeId>> adj(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (distance(positions[i], positions[j]) <= range_m) {
        adj[i].push_back(static_cast<NodeId>(j));
        adj[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

Medium::Medium(Simulator& sim, std::vector<Position> positions, RadioConfig cfg, std::uint64_t seed)
    : sim_(sim),
      positions_(std::move(positions)),
      cfg_(cfg),
      adjacency_(unit_disk_graph(positions_, cfg.range_m)),
      state_(positions_.size()) {
  loss_rng_.reserve(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    loss_rng_.emplace_back(seed, i, StreamPurpose::radio);
  }
}

Position Medium::position(NodeId node) const { return positions_.at(node); }

const std::vector<NodeId>& Medium::neighbors(NodeId node) const {
  if (node >= adjacency_.size()) {
    throw std::out_of_range("unknown node id " + std::to_string(node));
  }
  return adjacency_[node];
}

bool Medium::are_neighbors(NodeId a, NodeId b) const {
  const auto& list = neighbors(a);
  return std::binary_search(list.begin(), list.end(), b);
}

bool Medium::channel_busy(NodeId node) const {
  const auto& s = state_.at(node);
  return s.heard > 0 || s.transmitting;
}

void Medium::corrupt_pending(NodeRadio& node) {
  for (Reception* r : node.pending) {
    if (!r->corrupted) {
      r->corrupted = true;
      ++collisions_;
    }
  }
}

TxId Medium::transmit(NodeId sender, Duration duration, std::span<const Target> targets,
                      ReceptionFn on_reception, EndFn on_end) {
  const TxId id = next_tx_++;
  const auto& nbrs = neighbors(sender);

  NodeRadio& self = state_[sender];
  corrupt_pending(self);  // half-duplex
  self.transmitting = true;

  // Receivers that already hear something (or are sending) cannot decode this one.
  std::vector<NodeId> jammed;
  for (NodeId r : nbrs) {
    NodeRadio& rx = state_[r];
    if (rx.heard > 0 || rx.transmitting) {
      corrupt_pending(rx);
      jammed.push_back(r);
    }
    ++rx.heard;
  }

  auto shared_cb = std::make_shared<ReceptionFn>(std::move(on_reception));
  for (const Target& t : targets) {
    if (!std::binary_search(nbrs.begin(), nbrs.end(), t.receiver)) {
      throw std::invalid_argument("node " + std::to_string(t.receiver) + " is not a neighbor of " +
                                  std::to_string(sender));
    }
    auto rec = std::make_shared<Reception>(Reception{id});
    if (std::find(jammed.begin(), jammed.end(), t.receiver) != jammed.end()) {
      rec->corrupted = true;
      ++collisions_;
    }
    state_[t.receiver].pending.push_back(rec.get());

    const double p = reception_probability(cfg_, distance(positions_[sender], positions_[t.receiver]));
    const bool survives_distance = p >= 1.0 || loss_rng_[t.receiver].bernoulli(p);
    const NodeId receiver = t.receiver;
    sim_.schedule_in(std::min(t.deliver_after, duration), receiver, "rx",
                     [this, rec, receiver, survives_distance, shared_cb] {
                       auto& pend = state_[receiver].pending;
                       pend.erase(std::remove(pend.begin(), pend.end(), rec.get()), pend.end());
                       if (!rec->corrupted && !survives_distance) ++distance_losses_;
                       (*shared_cb)(receiver, !rec->corrupted && survives_distance);
                     });
  }

  sim_.schedule_in(duration, kMediumTarget, "tx_end", [this, sender, end = std::move(on_end)] {
    state_[sender].transmitting = false;
    for (NodeId r : adjacency_[sender]) --state_[r].heard;
    if (end) end();
  });
  return id;
}

}  // namespace llnsim

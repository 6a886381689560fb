// Unit-disk medium with distance loss and receiver-side collisions.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "llnsim/engine.hpp"
#include "llnsim/rng.hpp"

namespace llnsim {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

struct RadioConfig {
  double range_m = 5.0;
  /// p_rx(d) = 1 - loss_factor * (d / range)^2 inside the range.
  double loss_factor = 0.0;
  Duration us_per_byte = 32;  // 250 kbit/s
  Duration preamble_us = 160;
};

/// On-air time of one frame copy.
Duration airtime(const RadioConfig& cfg, std::size_t bytes);
double reception_probability(const RadioConfig& cfg, double distance_m);

/// Symmetric adjacency of the unit-disk graph: j is listed for i iff
/// distance(i, j) <= range. Lists are sorted by node id.
std::vector<std::vector<NodeId>> unit_disk_graph(std::span<const Position> positions, double range_m);

using TxId = std::uint64_t;

/// Shared channel. A transmission occupies the channel for its whole duration
/// and is audible at every neighbor of the sender. A pending reception fails
/// if, before its delivery instant, the receiver hears a second transmission
/// or starts transmitting itself. Distance loss is drawn per receiver.
class Medium {
public:
  /// receiver, delivered
  using ReceptionFn = std::function<void(NodeId, bool)>;
  using EndFn = std::function<void()>;

  struct Target {
    NodeId receiver;
    Duration deliver_after;  // offset from transmission start, <= duration
  };

  Medium(Simulator& sim, std::vector<Position> positions, RadioConfig cfg, std::uint64_t seed);

  std::size_t size() const { return positions_.size(); }
  const RadioConfig& config() const { return cfg_; }
  Position position(NodeId node) const;
  /// Throws std::out_of_range for an unknown node.
  const std::vector<NodeId>& neighbors(NodeId node) const;
  bool are_neighbors(NodeId a, NodeId b) const;

  /// True if the node hears an ongoing transmission or is transmitting.
  bool channel_busy(NodeId node) const;
  bool transmitting(NodeId node) const { return state_.at(node).transmitting; }

  /// Start a transmission now. Targets that are not neighbors of the sender
  /// are rejected with std::invalid_argument.
  TxId transmit(NodeId sender, Duration duration, std::span<const Target> targets,
                ReceptionFn on_reception, EndFn on_end);

  std::uint64_t collisions() const { return collisions_; }
  std::uint64_t distance_losses() const { return distance_losses_; }

private:
  struct Reception {
    TxId tx;
    bool corrupted = false;
  };
  struct NodeRadio {
    int heard = 0;
    bool transmitting = false;
    std::vector<Reception*> pending;
  };

  void corrupt_pending(NodeRadio& node);

  Simulator& sim_;
  std::vector<Position> positions_;
  RadioConfig cfg_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<NodeRadio> state_;
  std::vector<RngStream> loss_rng_;
  TxId next_tx_ = 1;
  std::uint64_t collisions_ = 0;
  std::uint64_t distance_losses_ = 0;
};

}  // namespace llnsim

// Non-slotted CSMA over a preamble-sampling duty-cycled link.
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string_view>

#include "llnsim/engine.hpp"
#include "llnsim/frame.hpp"
#include "llnsim/radio.hpp"
#include "llnsim/rng.hpp"

namespace llnsim {

struct MacConfig {
  std::size_t queue_capacity = 2;
  std::uint32_t max_attempts = 8;
  Duration wake_interval = millis(125);
  Duration backoff_unit = millis(125) / 16;
};

enum class MacDropCause : std::uint8_t { queue, csma };
std::string_view to_string(MacDropCause cause);

enum class LinkKind : std::uint8_t { unicast, broadcast };

/// Channel occupancy of one send. A unicast strobes until the receiver wakes
/// (uniform wait in [0, wake_interval)) and then carries the frame; a
/// broadcast strobes for a full wake interval so that every neighbor wakes once.
Duration link_delay(LinkKind kind, std::size_t payload_bytes, const MacConfig& mac,
                    const RadioConfig& radio, RngStream& rng);

/// Retry delay after `attempts` failed tries: uniform in
/// [1, 2^min(attempts, 4)] x backoff_unit.
Duration backoff_delay(std::uint32_t attempts, const MacConfig& mac, RngStream& rng);

class MacListener {
public:
  virtual ~MacListener() = default;
  virtual void on_frame(NodeId receiver, const Frame& frame, NodeId from) = 0;
  virtual void on_mac_drop(NodeId node, const Frame& frame, MacDropCause cause) = 0;
  virtual void on_mac_sent(NodeId /*node*/, const Frame& /*frame*/) {}
};

enum class CsmaOutcome : std::uint8_t { sent, backoff, dropped, idle };

class Mac {
public:
  Mac(NodeId self, Simulator& sim, Medium& medium, MacConfig cfg, MacListener& listener,
      std::uint64_t seed);

  Mac(const Mac&) = delete;
  Mac& operator=(const Mac&) = delete;

  /// Enqueue for transmission. Returns false (and reports a queue drop) when
  /// the queue is full.
  bool send(Frame frame);

  /// One channel-access attempt for the head frame. Normally driven by the
  /// event loop; exposed for fixtures.
  CsmaOutcome csma_attempt();

  NodeId id() const { return self_; }
  const std::deque<Frame>& queue() const { return queue_; }
  bool busy() const { return state_ != State::idle; }
  const MacConfig& config() const { return cfg_; }

  std::uint64_t transmissions() const { return transmissions_; }
  std::uint64_t queue_drops() const { return queue_drops_; }
  std::uint64_t csma_drops() const { return csma_drops_; }

private:
  enum class State : std::uint8_t { idle, waiting, transmitting };

  void schedule_attempt(Duration delay);
  void fail_attempt();
  void complete_head();

  NodeId self_;
  Simulator& sim_;
  Medium& medium_;
  MacConfig cfg_;
  MacListener& listener_;
  RngStream rng_;
  std::deque<Frame> queue_;
  State state_ = State::idle;
  bool head_delivered_ = false;
  std::uint64_t transmissions_ = 0;
  std::uint64_t queue_drops_ = 0;
  std::uint64_t csma_drops_ = 0;
};

}  // namespace llnsim

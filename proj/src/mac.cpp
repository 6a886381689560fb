#include "llnsim/mac.hpp"

#include <algorithm>
#include <vector>

namespace llnsim {

std::string_view to_string(MacDropCause cause) {
  return cause == MacDropCause::queue ? "queue" : "csma";
}

Duration link_delay(LinkKind kind, std::size_t payload_bytes, const MacConfig& mac,
                    const RadioConfig& radio, RngStream& rng) {
  const Duration air = airtime(radio, payload_bytes);
  if (kind == LinkKind::broadcast) return std::max(mac.wake_interval, air);
  return rng.uniform_duration(0, mac.wake_interval) + air;
}

Duration backoff_delay(std::uint32_t attempts, const MacConfig& mac, RngStream& rng) {
  const std::uint64_t window = 1ULL << std::min<std::uint32_t>(attempts, 4);
  return rng.uniform_duration(mac.backoff_unit, window * mac.backoff_unit + 1);
}

Mac::Mac(NodeId self, Simulator& sim, Medium& medium, MacConfig cfg, MacListener& listener,
         std::uint64_t seed)
    : self_(self), sim_(sim), medium_(medium), cfg_(cfg), listener_(listener),
      rng_(seed, self, StreamPurpose::mac) {}

bool Mac::send(Frame frame) {
  if (queue_.size() >= cfg_.queue_capacity) {
    ++queue_drops_;
    listener_.on_mac_drop(self_, frame, MacDropCause::queue);
    return false;
  }
  frame.src = self_;
  frame.enqueued_at = sim_.now();
  frame.attempts = 0;
  queue_.push_back(std::move(frame));
  if (state_ == State::idle) schedule_attempt(0);
  return true;
}

void Mac::schedule_attempt(Duration delay) {
  state_ = State::waiting;
  sim_.schedule_in(delay, self_, "csma", [this] { csma_attempt(); });
}

CsmaOutcome Mac::csma_attempt() {
  if (queue_.empty()) {
    state_ = State::idle;
    return CsmaOutcome::idle;
  }
  if (medium_.channel_busy(self_)) {
    const bool dropped = queue_.front().attempts + 1 > cfg_.max_attempts;
    fail_attempt();
    return dropped ? CsmaOutcome::dropped : CsmaOutcome::backoff;
  }

  const Frame& head = queue_.front();
  const Duration air = airtime(medium_.config(), head.payload_bytes);
  std::vector<Medium::Target> targets;
  Duration duration = 0;
  if (head.broadcast()) {
    duration = link_delay(LinkKind::broadcast, head.payload_bytes, cfg_, medium_.config(), rng_);
    // Each neighbor samples the channel at its own phase and catches one strobe.
    const Duration latest_phase = duration > air ? duration - air : 0;
    for (NodeId r : medium_.neighbors(self_)) {
      targets.push_back({r, rng_.uniform_duration(0, latest_phase) + air});
    }
  } else {
    duration = link_delay(LinkKind::unicast, head.payload_bytes, cfg_, medium_.config(), rng_);
    targets.push_back({head.dst, duration});
  }

  state_ = State::transmitting;
  head_delivered_ = false;
  ++transmissions_;
  const Frame copy = head;
  medium_.transmit(
      self_, duration, targets,
      [this, copy](NodeId receiver, bool ok) {
        if (!ok) return;
        if (!copy.broadcast()) head_delivered_ = true;
        listener_.on_frame(receiver, copy, self_);
      },
      [this] {
        if (queue_.front().broadcast() || head_delivered_) {
          complete_head();
        } else {
          fail_attempt();  // no acknowledgement
        }
      });
  return CsmaOutcome::sent;
}

void Mac::fail_attempt() {
  Frame& head = queue_.front();
  ++head.attempts;
  if (head.attempts > cfg_.max_attempts) {
    Frame dropped = std::move(head);
    queue_.pop_front();
    ++csma_drops_;
    listener_.on_mac_drop(self_, dropped, MacDropCause::csma);
    if (queue_.empty()) {
      state_ = State::idle;
    } else {
      schedule_attempt(0);
    }
    return;
  }
  schedule_attempt(backoff_delay(head.attempts, cfg_, rng_));
}

void Mac::complete_head() {
  Frame done = std::move(queue_.front());
  queue_.pop_front();
  listener_.on_mac_sent(self_, done);
  if (queue_.empty()) {
    state_ = State::idle;
  } else {
    schedule_attempt(0);
  }
}

}  // namespace llnsim

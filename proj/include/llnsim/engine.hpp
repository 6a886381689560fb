// Discrete-event core: virtual clock, event queue, cancellation and tracing.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace llnsim {

/// Microseconds since simulation start.
using SimTime = std::uint64_t;
/// Length of an interval in microseconds.
using Duration = std::uint64_t;
using NodeId = std::uint32_t;

inline constexpr Duration kMicrosPerMilli = 1'000;
inline constexpr Duration kMicrosPerSecond = 1'000'000;
inline constexpr SimTime kDefaultHorizon = 8ULL * 3600ULL * kMicrosPerSecond;

/// Event target used for events that belong to the shared medium rather than a node.
inline constexpr NodeId kMediumTarget = std::numeric_limits<NodeId>::max();

constexpr Duration seconds(std::uint64_t s) { return s * kMicrosPerSecond; }
constexpr Duration millis(std::uint64_t ms) { return ms * kMicrosPerMilli; }
constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

/// Raised when a handler schedules an event before the current clock.
class SchedulingError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct EventHandle {
  std::uint64_t seq = 0;
  bool valid() const { return seq != 0; }
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime clock = 0;
};

class Simulator {
public:
  using Action = std::function<void()>;

  SimTime now() const { return clock_; }

  /// Queue `action` at absolute time `at`. `kind` must outlive the simulator
  /// (string literals); it only feeds the trace.
  EventHandle schedule_at(SimTime at, NodeId target, std::string_view kind, Action action);
  EventHandle schedule_in(Duration delay, NodeId target, std::string_view kind, Action action) {
    return schedule_at(clock_ + delay, target, kind, std::move(action));
  }

  /// True if the event was still pending and has been removed.
  bool cancel(EventHandle handle);
  bool pending(EventHandle handle) const { return pending_.contains(handle.seq); }

  /// Process every event with fire_at <= horizon, then park the clock at horizon.
  RunSummary run_until(SimTime horizon);

  std::uint64_t events_processed() const { return processed_; }
  std::size_t queued() const { return pending_.size(); }

  /// Newline-delimited `time,seq,target,kind` records, one per dispatched event.
  void set_trace(std::ostream* out) { trace_ = out; }

private:
  struct Entry {
    SimTime fire_at;
    std::uint64_t seq;
    NodeId target;
    std::string_view kind;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
    }
  };

  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t processed_ = 0;
  std::vector<Entry> queue_;  // binary heap ordered by Later
  std::unordered_set<std::uint64_t> pending_;
  std::ostream* trace_ = nullptr;
};

}  // namespace llnsim

#include "llnsim/engine.hpp"

#include <algorithm>
#include <ostream>

namespace llnsim {

EventHandle Simulator::schedule_at(SimTime at, NodeId target, std::string_view kind, Action action) {
  if (at < clock_) {
    throw SchedulingError("past event: '" + std::string(kind) + "' at " + std::to_string(at) +
                          " us scheduled when clock is " + std::to_string(clock_) + " us");
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push_back(Entry{at, seq, target, kind, std::move(action)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
  pending_.insert(seq);
  return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle) {
  // The entry stays in the heap and is skipped when popped.
  return handle.valid() && pending_.erase(handle.seq) > 0;
}

RunSummary Simulator::run_until(SimTime horizon) {
  if (horizon < clock_) {
    throw SchedulingError("horizon " + std::to_string(horizon) + " us is before clock " +
                          std::to_string(clock_) + " us");
  }
  const std::uint64_t before = processed_;
  while (!queue_.empty() && queue_.front().fire_at <= horizon) {
    std::pop_heap(queue_.begin(), queue_.end(), Later{});
    Entry entry = std::move(queue_.back());
    queue_.pop_back();
    if (pending_.erase(entry.seq) == 0) continue;

    clock_ = entry.fire_at;
    ++processed_;
    if (trace_ != nullptr) {
      *trace_ << entry.fire_at << ',' << entry.seq << ',';
      if (entry.target == kMediumTarget) {
        *trace_ << "medium";
      } else {
        *trace_ << entry.target;
      }
      *trace_ << ',' << entry.kind << '\n';
    }
    entry.action();
  }
  clock_ = horizon;
  return RunSummary{processed_ - before, clock_};
}

}  // namespace llnsim

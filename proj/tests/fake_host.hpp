// Minimal RouterHost that records everything a router asks for.
#pragma once

#include <map>
#include <vector>

#include "llnsim/routing.hpp"

namespace testing {

struct SentControl {
  llnsim::SimTime time;
  llnsim::NodeId self;
  llnsim::NodeId link_dst;
  llnsim::Payload message;
  std::size_t bytes;
};

struct SentData {
  llnsim::NodeId self;
  llnsim::NodeId next_hop;
  llnsim::DataPacket packet;
};

struct Dropped {
  llnsim::NodeId self;
  llnsim::DataPacket packet;
  llnsim::DropCause cause;
  llnsim::SimTime time;
};

class FakeHost : public llnsim::RouterHost {
public:
  llnsim::Simulator simulator;
  std::vector<SentControl> control;
  std::vector<SentData> data;
  std::vector<llnsim::DataPacket> delivered;
  std::vector<Dropped> drops;
  std::map<llnsim::ControlEvent, int> events;
  bool accept_control = true;

  llnsim::Simulator& sim() override { return simulator; }
  bool send_control(llnsim::NodeId self, llnsim::NodeId link_dst, llnsim::Payload message,
                    std::size_t bytes) override {
    control.push_back({simulator.now(), self, link_dst, std::move(message), bytes});
    return accept_control;
  }
  bool send_data(llnsim::NodeId self, llnsim::NodeId next_hop, const llnsim::DataPacket& packet) override {
    data.push_back({self, next_hop, packet});
    return true;
  }
  void deliver(llnsim::NodeId, const llnsim::DataPacket& packet) override { delivered.push_back(packet); }
  void drop(llnsim::NodeId self, const llnsim::DataPacket& packet, llnsim::DropCause cause) override {
    drops.push_back({self, packet, cause, simulator.now()});
  }
  void table_changed(llnsim::NodeId, std::size_t) override {}
  void control_event(llnsim::NodeId, llnsim::ControlEvent event) override { ++events[event]; }

  template <typename T>
  std::vector<T> sent(typename T::Kind kind) const {
    std::vector<T> out;
    for (const auto& c : control) {
      if (const T* m = std::get_if<T>(&c.message); m != nullptr && m->kind == kind) out.push_back(*m);
    }
    return out;
  }
};

}  // namespace testing

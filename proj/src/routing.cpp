#include "llnsim/routing.hpp"

namespace llnsim {

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::queue: return "queue";
    case DropCause::csma: return "csma";
    case DropCause::discovery_timeout: return "discovery_timeout";
    case DropCause::buffer_overflow: return "buffer_overflow";
    case DropCause::no_route: return "no_route";
    case DropCause::hop_limit: return "hop_limit";
  }
  return "unknown";
}

std::string_view to_string(ControlEvent event) {
  switch (event) {
    case ControlEvent::malformed_dio: return "malformed_dio";
    case ControlEvent::rrep_no_route: return "rrep_no_route";
    case ControlEvent::table_eviction: return "table_eviction";
    case ControlEvent::discovery_started: return "discovery_started";
  }
  return "unknown";
}

std::optional<DataPacket> accept_data_frame(RouterHost& host, NodeId self, const Frame& frame) {
  DataPacket packet = std::get<DataPacket>(frame.payload);
  ++packet.hops;
  if (packet.dst == self) {
    host.deliver(self, packet);
    return std::nullopt;
  }
  if (packet.hops >= packet.hop_limit) {
    host.drop(self, packet, DropCause::hop_limit);
    return std::nullopt;
  }
  return packet;
}

}  // namespace llnsim

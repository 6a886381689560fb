#include "llnsim/frame.hpp"

namespace llnsim {

std::string_view to_string(AppKind kind) {
  switch (kind) {
    case AppKind::report: return "report";
    case AppKind::event: return "event";
    case AppKind::actuator_report: return "actuator-report";
    case AppKind::command: return "command";
    case AppKind::app_ack: return "app-ack";
  }
  return "unknown";
}

std::string_view control_name(const Payload& payload) {
  if (const auto* rpl = std::get_if<RplMessage>(&payload)) {
    switch (rpl->kind) {
      case RplMessage::Kind::dis: return "DIS";
      case RplMessage::Kind::dio: return "DIO";
      case RplMessage::Kind::dao: return "DAO";
    }
  }
  if (const auto* ld = std::get_if<LoadngMessage>(&payload)) {
    return ld->kind == LoadngMessage::Kind::rreq ? "RREQ" : "RREP";
  }
  return "DATA";
}

}  // namespace llnsim

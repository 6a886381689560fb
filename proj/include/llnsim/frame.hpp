// Payloads carried by MAC frames: routing control messages and application data.
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>

#include "llnsim/engine.hpp"

namespace llnsim {

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max() - 1;

enum class AppKind : std::uint8_t { report, event, actuator_report, command, app_ack };

std::string_view to_string(AppKind kind);

struct DataPacket {
  std::uint64_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  AppKind kind = AppKind::report;
  std::size_t payload_bytes = 16;
  SimTime created_at = 0;
  std::uint32_t hops = 0;
  std::uint32_t hop_limit = 64;
};

struct RplMessage {
  enum class Kind : std::uint8_t { dis, dio, dao };
  Kind kind = Kind::dio;
  NodeId sender = 0;
  std::uint32_t rank = 0;      // DIO
  NodeId target = 0;           // DAO: advertised destination
  std::uint32_t lifetime_s = 0;  // DAO
};

struct LoadngMessage {
  enum class Kind : std::uint8_t { rreq, rrep };
  Kind kind = Kind::rreq;
  /// RREQ: node looking for a route. RREP: node that answered (the sought destination).
  NodeId originator = 0;
  /// RREQ: sought destination. RREP: node the reply travels back to.
  NodeId destination = 0;
  std::uint32_t seq = 0;
  std::uint32_t hop_count = 0;
};

using Payload = std::variant<RplMessage, LoadngMessage, DataPacket>;

std::string_view control_name(const Payload& payload);

struct Frame {
  NodeId src = 0;
  NodeId dst = kBroadcast;
  Payload payload;
  std::size_t payload_bytes = 1;
  SimTime enqueued_at = 0;
  std::uint32_t attempts = 0;

  bool broadcast() const { return dst == kBroadcast; }
  bool is_data() const { return std::holds_alternative<DataPacket>(payload); }
};

}  // namespace llnsim

// House floor plans, topology generation with node roles, and traffic processes.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llnsim/engine.hpp"
#include "llnsim/radio.hpp"
#include "llnsim/rng.hpp"

namespace llnsim {

struct Room {
  std::string name;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double perimeter() const { return 2.0 * (width() + height()); }
  bool contains(Position p, double eps = 1e-9) const {
    return p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps;
  }
  /// Distance from p to the nearest wall of the room.
  double wall_distance(Position p) const;
};

struct FloorPlan {
  std::vector<Room> rooms;
  std::string living_room = "living";
  /// Fixed sink location inside the living room; sampled like any other
  /// living-room device when empty.
  std::optional<Position> sink_position;

  /// Six rooms, 130 m2, T-shaped: kitchen, living room and bedroom 2 along
  /// the top; hall, bedroom 1 and bathroom stacked below the living room.
  /// The sink sits 1 m from the living-room wall that faces the hall.
  static FloorPlan default_house();

  double total_area() const;
  bool contains(Position p) const;
  std::size_t room_index(std::string_view name) const;
  /// Throws std::invalid_argument on overlapping or degenerate rooms, a
  /// missing living room, or a sink position outside it.
  void validate() const;
};

enum class NodeRole : std::uint8_t { sink, monitoring_sensor, event_sensor, actuator };
std::string_view to_string(NodeRole role);
NodeRole role_from_string(std::string_view name);

struct RoleCounts {
  std::size_t sink = 1;
  std::size_t monitoring = 0;
  std::size_t event = 0;
  std::size_t actuators = 0;
};

/// 70/30 sensor/actuator split of the non-sink nodes, then 70/30
/// monitoring/event split of the sensors, both by largest remainder.
RoleCounts role_counts(std::size_t n);

/// Split `total` proportionally to `weights` with largest-remainder rounding.
/// Remainder ties go to the earlier index.
std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights);

struct Topology {
  FloorPlan plan;
  std::vector<Position> positions;
  std::vector<NodeRole> roles;
  std::uint64_t seed = 0;

  std::size_t size() const { return positions.size(); }
  NodeId sink() const;
  std::vector<NodeId> with_role(NodeRole role) const;
};

class TopologyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PlacementConfig {
  double wall_fraction = 0.8;
  double range_m = 5.0;
  int max_attempts = 100;
};

/// Room-proportional placement (80 % on walls, 20 % inside), sink in the living
/// room as node 0, roles shuffled over the other nodes. Resamples until the
/// unit-disk graph is connected; throws TopologyError after max_attempts.
Topology generate_topology(std::size_t n, std::uint64_t seed, const FloorPlan& plan,
                           const PlacementConfig& cfg = {});

Position sample_wall(const Room& room, RngStream& rng);
Position sample_interior(const Room& room, RngStream& rng);

double mean_degree(std::span<const Position> positions, double range_m);
bool is_connected(const std::vector<std::vector<NodeId>>& adjacency);

nlohmann::json to_json(const FloorPlan& plan);
FloorPlan floor_plan_from_json(const nlohmann::json& j);
/// Scenario file: {plan, nodes: [{id, x, y, role}], seed}.
nlohmann::json to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& j);

// Traffic processes.

struct TrafficConfig {
  Duration report_min = seconds(480);
  Duration report_max = seconds(720);
  double event_rate_per_hour = 10.0;
  double burst_rate_per_hour = 10.0;
  std::size_t burst_size = 5;
  std::size_t payload_bytes = 16;
};

/// Gap until the next periodic report, uniform in [report_min, report_max].
Duration next_report_interval(const TrafficConfig& cfg, RngStream& rng);
/// Exponential gap of a Poisson process with the given hourly rate.
Duration next_poisson_gap(double rate_per_hour, RngStream& rng);
/// `k` distinct actuators chosen uniformly, or with repetition when there are fewer than k.
std::vector<NodeId> pick_burst_targets(std::span<const NodeId> actuators, std::size_t k, RngStream& rng);

}  // namespace llnsim

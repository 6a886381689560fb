#include "llnsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace llnsim {

double Room::wall_distance(Position p) const {
  return std::min({std::abs(p.x - x0), std::abs(p.x - x1), std::abs(p.y - y0), std::abs(p.y - y1)});
}

FloorPlan FloorPlan::default_house() {
  FloorPlan plan;
  plan.rooms = {
      {"kitchen", 0.0, 0.0, 4.0, 5.0},
      {"living", 4.0, 0.0, 11.0, 5.0},
      {"bedroom-2", 11.0, 0.0, 15.0, 5.0},
      {"hall", 5.0, 5.0, 10.0, 9.0},
      {"bedroom-1", 5.0, 9.0, 10.0, 14.0},
      {"bathroom", 5.0, 14.0, 10.0, 16.0},
  };
  plan.living_room = "living";
  plan.sink_position = Position{7.5, 4.0};
  return plan;
}

double FloorPlan::total_area() const {
  double a = 0.0;
  for (const auto& r : rooms) a += r.area();
  return a;
}

bool FloorPlan::contains(Position p) const {
  return std::any_of(rooms.begin(), rooms.end(), [p](const Room& r) { return r.contains(p, 1e-6); });
}

std::size_t FloorPlan::room_index(std::string_view name) const {
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (rooms[i].name == name) return i;
  }
  throw std::invalid_argument("no room named '" + std::string(name) + "'");
}

void FloorPlan::validate() const {
  if (rooms.empty()) throw std::invalid_argument("floor plan has no rooms");
  for (const auto& r : rooms) {
    if (!(r.width() > 0.0 && r.height() > 0.0)) {
      throw std::invalid_argument("room '" + r.name + "' has non-positive extent");
    }
  }
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < rooms.size(); ++j) {
      const Room& a = rooms[i];
      const Room& b = rooms[j];
      const double ox = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
      const double oy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
      if (ox > 1e-9 && oy > 1e-9) {
        throw std::invalid_argument("rooms '" + a.name + "' and '" + b.name + "' overlap");
      }
    }
  }
  const Room& living = rooms[room_index(living_room)];
  if (sink_position && !living.contains(*sink_position)) {
    throw std::invalid_argument("sink position lies outside room '" + living_room + "'");
  }
}

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::sink: return "sink";
    case NodeRole::monitoring_sensor: return "monitoring";
    case NodeRole::event_sensor: return "event";
    case NodeRole::actuator: return "actuator";
  }
  return "unknown";
}

NodeRole role_from_string(std::string_view name) {
  if (name == "sink") return NodeRole::sink;
  if (name == "monitoring") return NodeRole::monitoring_sensor;
  if (name == "event") return NodeRole::event_sensor;
  if (name == "actuator") return NodeRole::actuator;
  throw std::invalid_argument("unknown node role '" + std::string(name) + "'");
}

std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  if (weights.empty() || sum <= 0.0) return out;
  std::vector<double> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    rem[i] = quota - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k % order.size()]];
  return out;
}

RoleCounts role_counts(std::size_t n) {
  RoleCounts rc;
  if (n == 0) {
    rc.sink = 0;
    return rc;
  }
  const double split[] = {0.7, 0.3};
  const auto sa = largest_remainder(n - 1, split);
  const auto me = largest_remainder(sa[0], split);
  rc.monitoring = me[0];
  rc.event = me[1];
  rc.actuators = sa[1];
  return rc;
}

NodeId Topology::sink() const {
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == NodeRole::sink) return static_cast<NodeId>(i);
  }
  throw std::logic_error("topology has no sink");
}

std::vector<NodeId> Topology::with_role(NodeRole role) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == role) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

Position sample_wall(const Room& room, RngStream& rng) {
  double s = rng.uniform(0.0, room.perimeter());
  const double w = room.width();
  const double h = room.height();
  if (s < w) return {room.x0 + s, room.y0};
  s -= w;
  if (s < h) return {room.x1, room.y0 + s};
  s -= h;
  if (s < w) return {room.x1 - s, room.y1};
  s -= w;
  return {room.x0, std::max(room.y0, room.y1 - s)};
}

Position sample_interior(const Room& room, RngStream& rng) {
  const double x = rng.uniform(room.x0, room.x1);
  const double y = rng.uniform(room.y0, room.y1);
  return {x, y};
}

bool is_connected(const std::vector<std::vector<NodeId>>& adjacency) {
  if (adjacency.empty()) return true;
  std::vector<bool> seen(adjacency.size(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == adjacency.size();
}

double mean_degree(std::span<const Position> positions, double range_m) {
  if (positions.empty()) return 0.0;
  const auto adj = unit_disk_graph(positions, range_m);
  std::size_t total = 0;
  for (const auto& l : adj) total += l.size();
  return static_cast<double>(total) / static_cast<double>(positions.size());
}

Topology generate_topology(std::size_t n, std::uint64_t seed, const FloorPlan& plan, const PlacementConfig& cfg) {
  if (n < 5) throw TopologyError("topology needs at least 5 nodes, got " + std::to_string(n));
  plan.validate();

  std::vector<double> areas;
  for (const auto& r : plan.rooms) areas.push_back(r.area());
  auto per_room = largest_remainder(n, areas);
  const std::size_t living = plan.room_index(plan.living_room);
  if (per_room[living] == 0) {
    auto donor = std::max_element(per_room.begin(), per_room.end());
    --*donor;
    ++per_room[living];
  }

  // Living room first so that its first device (the sink) is node 0.
  std::vector<std::size_t> room_order{living};
  for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
    if (i != living) room_order.push_back(i);
  }

  RngStream rng(seed, 0, StreamPurpose::topology);
  const double placement[] = {cfg.wall_fraction, 1.0 - cfg.wall_fraction};
  Topology topo;
  topo.plan = plan;
  topo.seed = seed;
  bool connected = false;
  for (int attempt = 0; attempt < cfg.max_attempts && !connected; ++attempt) {
    topo.positions.clear();
    for (std::size_t r : room_order) {
      const auto split = largest_remainder(per_room[r], placement);
      for (std::size_t k = 0; k < split[0]; ++k) topo.positions.push_back(sample_wall(plan.rooms[r], rng));
      for (std::size_t k = 0; k < split[1]; ++k) topo.positions.push_back(sample_interior(plan.rooms[r], rng));
    }
    if (plan.sink_position) topo.positions.front() = *plan.sink_position;
    connected = is_connected(unit_disk_graph(topo.positions, cfg.range_m));
  }
  if (!connected) {
    throw TopologyError("no connected topology for n=" + std::to_string(n) + " seed=" + std::to_string(seed) +
                        " after " + std::to_string(cfg.max_attempts) + " attempts");
  }

  const RoleCounts rc = role_counts(n);
  std::vector<NodeRole> others;
  others.insert(others.end(), rc.monitoring, NodeRole::monitoring_sensor);
  others.insert(others.end(), rc.event, NodeRole::event_sensor);
  others.insert(others.end(), rc.actuators, NodeRole::actuator);
  for (std::size_t i = others.size(); i > 1; --i) {
    std::swap(others[i - 1], others[rng.uniform_int(0, i - 1)]);
  }
  topo.roles.push_back(NodeRole::sink);
  topo.roles.insert(topo.roles.end(), others.begin(), others.end());
  return topo;
}

nlohmann::json to_json(const FloorPlan& plan) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const auto& r : plan.rooms) {
    rooms.push_back({{"name", r.name}, {"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}});
  }
  nlohmann::json j{{"rooms", rooms}, {"living_room", plan.living_room}};
  if (plan.sink_position) j["sink"] = {{"x", plan.sink_position->x}, {"y", plan.sink_position->y}};
  return j;
}

FloorPlan floor_plan_from_json(const nlohmann::json& j) {
  FloorPlan plan;
  for (const auto& r : j.at("rooms")) {
    plan.rooms.push_back(Room{r.at("name").get<std::string>(), r.at("x0").get<double>(), r.at("y0").get<double>(),
                              r.at("x1").get<double>(), r.at("y1").get<double>()});
  }
  plan.living_room = j.value("living_room", std::string("living"));
  if (j.contains("sink")) plan.sink_position = Position{j.at("sink").at("x").get<double>(), j.at("sink").at("y").get<double>()};
  plan.validate();
  return plan;
}

nlohmann::json to_json(const Topology& topology) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < topology.size(); ++i) {
    nodes.push_back({{"id", i},
                     {"x", topology.positions[i].x},
                     {"y", topology.positions[i].y},
                     {"role", to_string(topology.roles[i])}});
  }
  return {{"plan", to_json(topology.plan)}, {"nodes", nodes}, {"seed", topology.seed}};
}

Topology topology_from_json(const nlohmann::json& j) {
  Topology topo;
  topo.plan = j.contains("plan") ? floor_plan_from_json(j.at("plan")) : FloorPlan::default_house();
  topo.seed = j.value("seed", std::uint64_t{0});
  const auto& nodes = j.at("nodes");
  topo.positions.resize(nodes.size());
  topo.roles.resize(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  std::size_t sinks = 0;
  for (const auto& node : nodes) {
    const auto id = node.at("id").get<std::size_t>();
    if (id >= nodes.size() || seen[id]) {
      throw std::invalid_argument("scenario node ids must be unique and in [0, n)");
    }
    seen[id] = true;
    topo.positions[id] = Position{node.at("x").get<double>(), node.at("y").get<double>()};
    topo.roles[id] = role_from_string(node.at("role").get<std::string>());
    if (topo.roles[id] == NodeRole::sink) ++sinks;
  }
  if (sinks != 1) throw std::invalid_argument("scenario must contain exactly one sink");
  return topo;
}

Duration next_report_interval(const TrafficConfig& cfg, RngStream& rng) {
  return rng.uniform_duration(cfg.report_min, cfg.report_max + 1);
}

Duration next_poisson_gap(double rate_per_hour, RngStream& rng) {
  const double mean_us = 3600.0 * 1e6 / rate_per_hour;
  return static_cast<Duration>(std::llround(rng.exponential(mean_us)));
}

std::vector<NodeId> pick_burst_targets(std::span<const NodeId> actuators, std::size_t k, RngStream& rng) {
  std::vector<NodeId> out;
  if (actuators.empty()) return out;
  if (actuators.size() < k) {
    for (std::size_t i = 0; i < k; ++i) out.push_back(actuators[rng.uniform_int(0, actuators.size() - 1)]);
    return out;
  }
  std::vector<NodeId> pool(actuators.begin(), actuators.end());
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[rng.uniform_int(i, pool.size() - 1)]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace llnsim

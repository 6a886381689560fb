#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "llnsim/network.hpp"
#include "llnsim/scenario.hpp"

using namespace llnsim;

TEST_CASE("role split for 25 nodes") {
  // 24 non-sink nodes: 16.8 sensors rounds to 17, of which 11.9 monitoring rounds to 12.
  const auto rc = role_counts(25);
  CHECK(rc.sink == 1);
  CHECK(rc.monitoring == 12);
  CHECK(rc.event == 5);
  CHECK(rc.actuators == 7);
  for (std::size_t n = 5; n <= 60; ++n) {
    const auto r = role_counts(n);
    CHECK(r.sink + r.monitoring + r.event + r.actuators == n);
  }
}

TEST_CASE("largest remainder rounding") {
  const std::vector<double> w{1, 1, 1};
  CHECK(largest_remainder(10, w) == std::vector<std::size_t>{4, 3, 3});
  const std::vector<double> w2{0.8, 0.2};
  CHECK(largest_remainder(7, w2) == std::vector<std::size_t>{6, 1});
}

TEST_CASE("default house covers 130 square metres without overlaps") {
  const FloorPlan plan = FloorPlan::default_house();
  CHECK_NOTHROW(plan.validate());
  CHECK(plan.rooms.size() == 6);
  CHECK(plan.total_area() == doctest::Approx(130.0).epsilon(0.5 / 130.0));
  CHECK(plan.rooms[plan.room_index("living")].area() == doctest::Approx(35.0));
  REQUIRE(plan.sink_position);
  CHECK(plan.rooms[plan.room_index("living")].contains(*plan.sink_position));
}

TEST_CASE("floor plan validation") {
  FloorPlan p;
  p.rooms = {{"living", 0, 0, 5, 5}, {"kitchen", 4, 4, 8, 8}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.rooms = {{"kitchen", 0, 0, 5, 5}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.rooms = {{"living", 0, 0, 5, 5}};
  p.sink_position = Position{6, 1};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("generated topologies respect placement rules") {
  const FloorPlan plan = FloorPlan::default_house();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Topology t = generate_topology(25, seed, plan);
    REQUIRE(t.size() == 25);
    CHECK(t.sink() == 0);
    CHECK(t.roles[0] == NodeRole::sink);
    CHECK(t.with_role(NodeRole::monitoring_sensor).size() == 12);
    CHECK(t.with_role(NodeRole::event_sensor).size() == 5);
    CHECK(t.with_role(NodeRole::actuator).size() == 7);
    CHECK(is_connected(unit_disk_graph(t.positions, 5.0)));
    std::size_t near_wall = 0;
    for (const auto& p : t.positions) {
      CHECK(plan.contains(p));
      bool on_wall = false;
      for (const auto& r : plan.rooms) on_wall |= r.contains(p) && r.wall_distance(p) <= 0.01;
      near_wall += on_wall ? 1 : 0;
    }
    // At least the 80 % wall share lands on perimeters (interior samples rarely do).
    CHECK(near_wall >= 19);
  }
}

TEST_CASE("wall samples lie on the perimeter and interior samples inside") {
  RngStream rng(5, 0, StreamPurpose::topology);
  const Room r{"r", 1, 2, 6, 4};
  for (int i = 0; i < 1000; ++i) {
    const Position w = sample_wall(r, rng);
    CHECK(r.contains(w));
    CHECK(r.wall_distance(w) <= 0.01);
    CHECK(r.contains(sample_interior(r, rng)));
  }
}

TEST_CASE("per-room counts follow area") {
  const FloorPlan plan = FloorPlan::default_house();
  const Topology t = generate_topology(25, 3, plan);
  std::vector<double> areas;
  for (const auto& r : plan.rooms) areas.push_back(r.area());
  const auto expected = largest_remainder(25, areas);
  // Devices are laid out room by room, living room first.
  std::vector<std::size_t> order{plan.room_index(plan.living_room)};
  for (std::size_t r = 0; r < plan.rooms.size(); ++r) {
    if (r != order[0]) order.push_back(r);
  }
  std::size_t next = 0;
  for (std::size_t r : order) {
    for (std::size_t k = 0; k < expected[r]; ++k) CHECK(plan.rooms[r].contains(t.positions.at(next++)));
  }
  CHECK(next == t.size());
}

TEST_CASE("topology generation is deterministic per seed") {
  const FloorPlan plan = FloorPlan::default_house();
  const Topology a = generate_topology(25, 9, plan);
  const Topology b = generate_topology(25, 9, plan);
  const Topology c = generate_topology(25, 10, plan);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_json(a).dump() != to_json(c).dump());
}

TEST_CASE("generation errors") {
  CHECK_THROWS_AS(generate_topology(4, 1, FloorPlan::default_house()), TopologyError);
  FloorPlan apart;
  apart.rooms = {{"living", 0, 0, 3, 3}, {"shed", 40, 40, 43, 43}};
  CHECK_THROWS_AS(generate_topology(10, 1, apart), TopologyError);
}

TEST_CASE("scenario JSON round trip") {
  const Topology t = generate_topology(15, 4, FloorPlan::default_house());
  const Topology back = topology_from_json(to_json(t));
  CHECK(to_json(back).dump() == to_json(t).dump());
  auto j = to_json(t);
  j["nodes"][1]["role"] = "sink";
  CHECK_THROWS(topology_from_json(j));
}

TEST_CASE("report intervals are uniform in [480 s, 720 s]") {
  RngStream rng(1, 3, StreamPurpose::traffic);
  TrafficConfig cfg;
  double sum = 0.0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) {
    const Duration d = next_report_interval(cfg, rng);
    REQUIRE(d >= seconds(480));
    REQUIRE(d <= seconds(720));
    sum += to_seconds(d);
  }
  CHECK(sum / n == doctest::Approx(600.0).epsilon(0.005));
}

TEST_CASE("Poisson gaps have the configured mean") {
  RngStream rng(1, 0, StreamPurpose::events);
  double sum = 0.0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) sum += to_seconds(next_poisson_gap(10.0, rng));
  CHECK(sum / n == doctest::Approx(360.0).epsilon(0.03));
}

TEST_CASE("burst targets are distinct when enough actuators exist") {
  RngStream rng(1, 0, StreamPurpose::bursts);
  const std::vector<NodeId> many{3, 4, 8, 9, 11, 12, 20};
  for (int i = 0; i < 100; ++i) {
    const auto t = pick_burst_targets(many, 5, rng);
    CHECK(t.size() == 5);
    CHECK(std::set<NodeId>(t.begin(), t.end()).size() == 5);
  }
  const std::vector<NodeId> few{3, 4};
  const auto t = pick_burst_targets(few, 5, rng);
  CHECK(t.size() == 5);
  for (NodeId x : t) CHECK((x == 3 || x == 4));
}

TEST_CASE("every received non-ack packet is acknowledged once") {
  SimConfig cfg;
  cfg.protocol = Protocol::rpl;
  cfg.horizon = seconds(2 * 3600);
  Network net(generate_topology(25, 2, FloorPlan::default_house()), cfg);
  std::map<std::uint64_t, DataPacket> created;
  std::map<std::pair<NodeId, NodeId>, int> acks_expected, acks_sent;
  net.set_origin_observer([&](SimTime, const DataPacket& p) {
    created[p.id] = p;
    if (p.kind == AppKind::app_ack) ++acks_sent[{p.src, p.dst}];
  });
  int bursts_triggered = 0;
  net.set_delivery_observer([&](SimTime, NodeId at, const DataPacket& p) {
    if (p.kind != AppKind::app_ack) ++acks_expected[{at, p.src}];
    if (at == net.sink() && p.kind == AppKind::event) ++bursts_triggered;
  });
  net.run();
  CHECK(acks_expected == acks_sent);
  std::size_t commands = 0;
  for (const auto& [id, p] : created) commands += p.kind == AppKind::command ? 1 : 0;
  CHECK(commands % 5 == 0);
  CHECK(commands >= 5u * static_cast<std::size_t>(bursts_triggered));
}

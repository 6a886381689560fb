#include <doctest.h>

#include "fake_host.hpp"
#include "helpers.hpp"
#include "llnsim/network.hpp"
#include "oracle.hpp"

using namespace llnsim;
using testing::FakeHost;

namespace {

LoadngMessage rreq(NodeId originator, NodeId dest, std::uint32_t seq, std::uint32_t hops) {
  return LoadngMessage{LoadngMessage::Kind::rreq, originator, dest, seq, hops};
}

LoadngMessage rrep(NodeId replier, NodeId back_to, std::uint32_t seq, std::uint32_t hops) {
  return LoadngMessage{LoadngMessage::Kind::rrep, replier, back_to, seq, hops};
}

DataPacket packet_to(NodeId src, NodeId dst, std::uint64_t id) {
  DataPacket p;
  p.id = id;
  p.src = src;
  p.dst = dst;
  return p;
}

}  // namespace

TEST_CASE("first RREQ copy installs a reverse route and is re-broadcast") {
  FakeHost host;
  LoadngRouter r(3, false, host, LoadngConfig{});
  r.on_rreq(rreq(7, 0, 1, 0), 7);
  REQUIRE(r.route(7));
  CHECK(r.route(7)->next_hop == 7);
  CHECK(r.route(7)->metric == 1);
  CHECK(r.route(7)->origin == RouteOrigin::reverse_from_rreq);
  const auto fwd = host.sent<LoadngMessage>(LoadngMessage::Kind::rreq);
  REQUIRE(fwd.size() == 1);
  CHECK(fwd[0].hop_count == 1);
  CHECK(host.control[0].link_dst == kBroadcast);
}

TEST_CASE("duplicate RREQs are forwarded again only when strictly better") {
  FakeHost host;
  LoadngRouter r(3, false, host, LoadngConfig{});
  r.on_rreq(rreq(7, 0, 1, 3), 4);
  r.on_rreq(rreq(7, 0, 1, 3), 5);  // equal
  r.on_rreq(rreq(7, 0, 1, 4), 6);  // worse
  CHECK(r.rreqs_forwarded() == 1);
  r.on_rreq(rreq(7, 0, 1, 1), 8);  // better
  CHECK(r.rreqs_forwarded() == 2);
  CHECK(r.route(7)->next_hop == 8);
  CHECK(r.route(7)->metric == 2);
  r.on_rreq(rreq(7, 0, 2, 5), 4);  // new sequence number
  CHECK(r.rreqs_forwarded() == 3);
  CHECK(r.route(7)->metric == 2);  // a worse metric never replaces a valid route
}

TEST_CASE("destination replies to the first RREQ and to every better copy") {
  FakeHost host;
  LoadngRouter sink(0, true, host, LoadngConfig{});
  sink.on_rreq(rreq(9, 0, 4, 3), 2);
  sink.on_rreq(rreq(9, 0, 4, 3), 5);
  sink.on_rreq(rreq(9, 0, 4, 1), 6);
  const auto reps = host.sent<LoadngMessage>(LoadngMessage::Kind::rrep);
  REQUIRE(reps.size() == 2);
  CHECK(host.control[0].link_dst == 2);
  CHECK(host.control[1].link_dst == 6);
  CHECK(reps[0].originator == 0);
  CHECK(reps[0].destination == 9);
  CHECK(sink.rreqs_forwarded() == 0);
}

TEST_CASE("RREP installs forward routes and is relayed on the reverse route") {
  FakeHost host;
  LoadngRouter mid(3, false, host, LoadngConfig{});
  mid.on_rreq(rreq(7, 0, 1, 0), 7);
  host.control.clear();
  mid.on_rrep(rrep(0, 7, 1, 1), 2);
  REQUIRE(mid.route(0));
  CHECK(mid.route(0)->next_hop == 2);
  CHECK(mid.route(0)->metric == 2);
  CHECK(mid.route(0)->origin == RouteOrigin::forward_from_rrep);
  REQUIRE(host.control.size() == 1);
  CHECK(host.control[0].link_dst == 7);
  CHECK(std::get<LoadngMessage>(host.control[0].message).hop_count == 2);
}

TEST_CASE("RREP without a reverse route is counted and dropped") {
  FakeHost host;
  LoadngRouter mid(3, false, host, LoadngConfig{});
  mid.on_rrep(rrep(0, 7, 1, 1), 2);
  CHECK(host.control.empty());
  CHECK(host.events[ControlEvent::rrep_no_route] == 1);
}

TEST_CASE("route hold time boundary") {
  FakeHost host;
  LoadngRouter r(3, false, host, LoadngConfig{});
  r.on_rreq(rreq(7, 0, 1, 0), 7);
  host.simulator.run_until(seconds(599));
  CHECK(r.route(7));
  CHECK(r.expire_routes(host.simulator.now()).empty());
  host.simulator.run_until(seconds(600));
  CHECK(r.route(7));
  host.simulator.run_until(seconds(601));
  CHECK_FALSE(r.route(7));
  CHECK(r.routes().empty());
}

TEST_CASE("expire_routes removes exactly the stale entries") {
  FakeHost host;
  LoadngRouter r(3, false, host, LoadngConfig{});
  r.on_rreq(rreq(7, 0, 1, 0), 7);
  host.simulator.run_until(seconds(300));
  r.on_rreq(rreq(8, 0, 1, 0), 8);
  host.simulator.run_until(seconds(600));
  const auto removed = r.expire_routes(seconds(601));
  REQUIRE(removed.size() == 1);
  CHECK(removed[0].destination == 7);
  CHECK(r.routes().contains(8));
}

TEST_CASE("a longer hold time keeps routes longer") {
  FakeHost host;
  LoadngConfig cfg;
  cfg.route_hold_time = seconds(3600);
  LoadngRouter r(3, false, host, cfg);
  r.on_rreq(rreq(7, 0, 1, 0), 7);
  host.simulator.run_until(seconds(3000));
  CHECK(r.route(7));
}

TEST_CASE("send without a route buffers and floods") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  r.send(packet_to(4, 0, 1));
  CHECK(r.discovery_pending(0));
  CHECK(r.buffer().size() == 1);
  const auto reqs = host.sent<LoadngMessage>(LoadngMessage::Kind::rreq);
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].originator == 4);
  CHECK(reqs[0].destination == 0);
  CHECK(reqs[0].hop_count == 0);
  CHECK(reqs[0].seq == 1);
  r.send(packet_to(4, 0, 2));  // same destination: no second flood
  CHECK(host.sent<LoadngMessage>(LoadngMessage::Kind::rreq).size() == 1);
}

TEST_CASE("discovery buffer drops the oldest packet when full") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  r.send(packet_to(4, 0, 1));
  r.send(packet_to(4, 0, 2));
  r.send(packet_to(4, 0, 3));
  REQUIRE(host.drops.size() == 1);
  CHECK(host.drops[0].packet.id == 1);
  CHECK(host.drops[0].cause == DropCause::buffer_overflow);
  CHECK(r.buffer().size() == 2);
}

TEST_CASE("unanswered discovery drops its packets at exactly +10 s") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  host.simulator.run_until(seconds(5));
  r.send(packet_to(4, 0, 1));
  host.simulator.run_until(seconds(15) - 1);
  CHECK(host.drops.empty());
  host.simulator.run_until(seconds(15));
  REQUIRE(host.drops.size() == 1);
  CHECK(host.drops[0].cause == DropCause::discovery_timeout);
  CHECK(host.drops[0].time == seconds(15));
  CHECK_FALSE(r.discovery_pending(0));
}

TEST_CASE("RREP before the deadline flushes the buffer") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  r.send(packet_to(4, 0, 1));
  host.simulator.run_until(seconds(9));
  r.on_rrep(rrep(0, 4, 1, 1), 2);
  REQUIRE(host.data.size() == 1);
  CHECK(host.data[0].next_hop == 2);
  host.simulator.run_until(seconds(30));
  CHECK(host.drops.empty());
  CHECK(r.buffer().empty());
}

TEST_CASE("late RREP installs the route after the packets were dropped") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  r.send(packet_to(4, 0, 1));
  host.simulator.run_until(seconds(11));
  CHECK(host.drops.size() == 1);
  r.on_rrep(rrep(0, 4, 1, 1), 2);
  CHECK(host.data.empty());
  REQUIRE(r.route(0));
  r.send(packet_to(4, 0, 2));
  REQUIRE(host.data.size() == 1);
  CHECK(host.data[0].next_hop == 2);
}

TEST_CASE("first RREP carries the buffered packet; a better one only updates the table") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  r.send(packet_to(4, 0, 1));
  r.on_rrep(rrep(0, 4, 1, 4), 6);  // 5-hop route
  REQUIRE(host.data.size() == 1);
  CHECK(host.data[0].next_hop == 6);
  r.on_rrep(rrep(0, 4, 1, 2), 2);  // 3-hop route
  CHECK(host.data.size() == 1);
  CHECK(r.route(0)->metric == 3);
  CHECK(r.route(0)->next_hop == 2);
}

TEST_CASE("intermediate node without a route drops forwarded data") {
  FakeHost host;
  LoadngRouter r(4, false, host, LoadngConfig{});
  Frame f;
  f.dst = 4;
  f.payload = packet_to(9, 0, 1);
  r.on_frame(f, 9);
  // An intermediate has no buffer of its own for transit traffic.
  REQUIRE(host.drops.size() == 1);
  CHECK(host.drops[0].cause == DropCause::no_route);
}

TEST_CASE("installed routes are never shorter than the BFS distance") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    CAPTURE(seed);
    const Topology topo = generate_topology(25, seed, FloorPlan::default_house());
    SimConfig cfg;
    cfg.protocol = Protocol::loadng;
    cfg.seed = seed;
    cfg.horizon = seconds(3600);
    Network net(topo, cfg);
    std::vector<std::vector<int>> depth;
    for (NodeId i = 0; i < net.size(); ++i) depth.push_back(oracle::bfs_depth(topo.positions, i, 5.0));
    std::size_t checked = 0;
    net.set_sample_observer([&](SimTime) {
      for (NodeId i = 0; i < net.size(); ++i) {
        for (const auto& [dst, e] : net.loadng(i).routes()) {
          CHECK(static_cast<int>(e.metric) >= depth[i][dst]);
          ++checked;
        }
      }
    });
    net.run();
    CHECK(checked > 0);
  }
}

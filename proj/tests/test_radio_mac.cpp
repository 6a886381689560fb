#include <doctest.h>

#include <sstream>

#include "llnsim/mac.hpp"
#include "llnsim/radio.hpp"

using namespace llnsim;

TEST_CASE("unit disk boundary is inclusive at the range") {
  const std::vector<Position> pos{{0, 0}, {4.9, 0}, {0, 5.1}, {5.0, 0}};
  const auto g = unit_disk_graph(pos, 5.0);
  CHECK(g[0] == std::vector<NodeId>{1, 3});
  CHECK(g[2].empty());
  for (NodeId i = 0; i < pos.size(); ++i) {
    for (NodeId j : g[i]) CHECK(std::find(g[j].begin(), g[j].end(), i) != g[j].end());
  }
}

TEST_CASE("reception probability follows the quadratic loss law") {
  RadioConfig cfg;
  CHECK(reception_probability(cfg, 3.0) == 1.0);
  cfg.loss_factor = 0.4;
  CHECK(reception_probability(cfg, 2.5) == doctest::Approx(0.9));
  CHECK(reception_probability(cfg, 5.0) == doctest::Approx(0.6));
  CHECK(reception_probability(cfg, 5.01) == 0.0);
  CHECK(airtime(cfg, 50) == 1760);
}

TEST_CASE("Monte Carlo delivery rate matches the loss law") {
  Simulator sim;
  RadioConfig cfg;
  cfg.loss_factor = 0.4;
  Medium medium(sim, {{0, 0}, {2.5, 0}}, cfg, 5);
  int ok = 0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) {
    const Medium::Target t{1, 100};
    medium.transmit(0, 100, std::span(&t, 1), [&](NodeId, bool good) { ok += good ? 1 : 0; }, nullptr);
    sim.run_until(sim.now() + 200);
  }
  CHECK(static_cast<double>(ok) / n == doctest::Approx(0.9).epsilon(0.0112));
}

TEST_CASE("overlapping transmissions collide at a shared receiver") {
  Simulator sim;
  // 0 and 2 cannot hear each other, 1 hears both.
  Medium medium(sim, {{0, 0}, {4, 0}, {8, 0}}, RadioConfig{}, 1);
  std::vector<bool> outcome;
  const Medium::Target t{1, 1000};
  medium.transmit(0, 1000, std::span(&t, 1), [&](NodeId, bool good) { outcome.push_back(good); }, nullptr);
  sim.schedule_at(500, 2, "hidden", [&] {
    CHECK_FALSE(medium.channel_busy(2));
    medium.transmit(2, 1000, std::span(&t, 1), [&](NodeId, bool good) { outcome.push_back(good); }, nullptr);
  });
  sim.run_until(5000);
  CHECK(outcome == std::vector<bool>{false, false});
  CHECK(medium.collisions() >= 1);

  // Transmissions that do not overlap at the receiver both succeed.
  outcome.clear();
  medium.transmit(0, 1000, std::span(&t, 1), [&](NodeId, bool good) { outcome.push_back(good); }, nullptr);
  sim.schedule_at(sim.now() + 2000, 2, "later", [&] {
    medium.transmit(2, 1000, std::span(&t, 1), [&](NodeId, bool good) { outcome.push_back(good); }, nullptr);
  });
  sim.run_until(sim.now() + 5000);
  CHECK(outcome == std::vector<bool>{true, true});
}

TEST_CASE("medium rejects unknown nodes and non-neighbor targets") {
  Simulator sim;
  Medium medium(sim, {{0, 0}, {10, 0}}, RadioConfig{}, 1);
  CHECK_THROWS_AS(medium.neighbors(7), std::out_of_range);
  const Medium::Target t{1, 10};
  CHECK_THROWS_AS(medium.transmit(0, 10, std::span(&t, 1), nullptr, nullptr), std::invalid_argument);
}

namespace {

struct Recorder : MacListener {
  std::vector<std::pair<NodeId, SimTime>> received;
  std::vector<MacDropCause> drops;
  Simulator* sim = nullptr;
  void on_frame(NodeId receiver, const Frame&, NodeId) override { received.emplace_back(receiver, sim->now()); }
  void on_mac_drop(NodeId, const Frame&, MacDropCause cause) override { drops.push_back(cause); }
};

Frame data_frame(NodeId dst) {
  Frame f;
  f.dst = dst;
  f.payload = DataPacket{};
  f.payload_bytes = 16;
  return f;
}

}  // namespace

TEST_CASE("queue holds two frames and drops the third") {
  Simulator sim;
  Medium medium(sim, {{0, 0}, {1, 0}}, RadioConfig{}, 1);
  Recorder rec;
  rec.sim = &sim;
  Mac mac(0, sim, medium, MacConfig{}, rec, 1);
  CHECK(mac.send(data_frame(1)));
  CHECK(mac.send(data_frame(1)));
  CHECK_FALSE(mac.send(data_frame(1)));
  CHECK(mac.queue().size() == 2);
  CHECK(mac.queue_drops() == 1);
  REQUIRE(rec.drops.size() == 1);
  CHECK(rec.drops[0] == MacDropCause::queue);
  sim.run_until(seconds(2));
  CHECK(rec.received.size() == 2);
  CHECK(mac.queue().empty());
}

TEST_CASE("busy channel defers broadcasts instead of discarding them") {
  Simulator sim;
  Medium medium(sim, {{0, 0}, {1, 0}}, RadioConfig{}, 1);
  Recorder rec;
  rec.sim = &sim;
  Mac mac(0, sim, medium, MacConfig{}, rec, 1);
  medium.transmit(1, millis(20), {}, nullptr, nullptr);
  Frame b;
  b.payload = RplMessage{};
  b.payload_bytes = 76;
  mac.send(b);
  CHECK(mac.csma_attempt() == CsmaOutcome::backoff);
  CHECK(mac.queue().front().attempts >= 1);
  sim.run_until(seconds(2));
  CHECK(rec.drops.empty());
  REQUIRE(rec.received.size() == 1);
  CHECK(rec.received[0].first == 1);
}

TEST_CASE("jammed channel drops the frame after max attempts") {
  Simulator sim;
  Medium medium(sim, {{0, 0}, {1, 0}}, RadioConfig{}, 1);
  Recorder rec;
  rec.sim = &sim;
  MacConfig cfg;
  Mac mac(0, sim, medium, cfg, rec, 1);
  medium.transmit(1, seconds(60), {}, nullptr, nullptr);  // jammer
  std::ostringstream trace;
  sim.set_trace(&trace);
  mac.send(data_frame(1));
  sim.run_until(seconds(60));
  const std::string t = trace.str();
  std::size_t checks = 0;
  for (std::size_t pos = t.find(",csma\n"); pos != std::string::npos; pos = t.find(",csma\n", pos + 1)) ++checks;
  CHECK(checks == cfg.max_attempts + 1);
  CHECK(mac.csma_drops() == 1);
  CHECK(mac.transmissions() == 0);
  REQUIRE(rec.drops.size() == 1);
  CHECK(rec.drops[0] == MacDropCause::csma);
}

TEST_CASE("unicast link delay distribution") {
  RngStream rng(4, 0, StreamPurpose::mac);
  MacConfig mac;
  RadioConfig radio;
  const int n = 10'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Duration d = link_delay(LinkKind::unicast, 50, mac, radio, rng);
    REQUIRE(d >= 1760);
    REQUIRE(d < 126'760);
    sum += static_cast<double>(d);
  }
  CHECK(sum / n / 1000.0 == doctest::Approx(64.26).epsilon(2.0 / 64.26));
  CHECK(link_delay(LinkKind::broadcast, 200, mac, radio, rng) == millis(125));
}

TEST_CASE("backoff window grows and saturates") {
  RngStream rng(9, 0, StreamPurpose::mac);
  MacConfig mac;
  for (std::uint32_t a = 1; a <= 8; ++a) {
    const std::uint64_t window = 1ULL << std::min<std::uint32_t>(a, 4);
    Duration lo = ~Duration{0}, hi = 0;
    for (int i = 0; i < 5000; ++i) {
      const Duration d = backoff_delay(a, mac, rng);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    CHECK(lo >= mac.backoff_unit);
    CHECK(hi <= window * mac.backoff_unit);
    CHECK(hi > (window - 1) * mac.backoff_unit);
  }
}

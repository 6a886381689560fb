#include <doctest.h>

#include <cmath>

#include "llnsim/metrics.hpp"

using namespace llnsim;

TEST_CASE("empirical CDF at thresholds") {
  const std::vector<double> s{0.1, 0.4, 0.9};
  const std::vector<double> t{0.05, 0.5, 1.0};
  const auto f = cdf(s, t);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(2.0 / 3.0));
  CHECK(f[2] == 1.0);
  CHECK_THROWS_AS(cdf(std::vector<double>{}, t), std::invalid_argument);
}

TEST_CASE("CDF is monotone and bounded") {
  std::vector<double> s;
  for (int i = 0; i < 500; ++i) s.push_back(std::fmod(i * 0.7319, 6.0));
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i / 10.0);
  const auto f = cdf(s, grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] >= 0.0);
    CHECK(f[i] <= 1.0);
    if (i > 0) CHECK(f[i] >= f[i - 1]);
  }
}

TEST_CASE("path hop distance averages per pair") {
  std::vector<DelaySample> d{{1, 3, 0, 2, 10}, {2, 3, 0, 2, 10}, {3, 3, 0, 4, 10}, {4, 0, 5, 1, 10}};
  const auto h = path_vs_packet_hops(d);
  REQUIRE(h.path.size() == 2);
  CHECK(std::find_if(h.path.begin(), h.path.end(), [](double x) { return std::abs(x - 8.0 / 3.0) < 1e-12; }) !=
        h.path.end());
  CHECK(h.packet.size() == 4);
}

TEST_CASE("Student-t interval") {
  const auto in = mean_ci95(std::vector<double>{10, 12, 11, 13, 14});
  CHECK(in.mean == doctest::Approx(12.0));
  REQUIRE(in.half_width);
  // 2.776 * sqrt(2.5) / sqrt(5)
  CHECK(*in.half_width == doctest::Approx(1.963).epsilon(0.001));
  const auto flat = mean_ci95(std::vector<double>{3, 3, 3, 3, 3});
  CHECK(*flat.half_width == 0.0);
  const auto single = mean_ci95(std::vector<double>{7});
  CHECK(single.mean == 7.0);
  CHECK_FALSE(single.half_width);
}

TEST_CASE("duplicate deliveries are counted once") {
  Collector c(3);
  DataPacket p;
  p.id = 5;
  c.packet_generated(p);
  CHECK(c.record_delivery({5, 1, 0, 1, 300'000}));
  CHECK_FALSE(c.record_delivery({5, 1, 0, 1, 400'000}));
  CHECK(c.delivered() == 1);
}

TEST_CASE("time-weighted table means") {
  Collector c(2);
  c.record_table(0, 0, 0);
  c.record_table(1, 0, 4);
  c.record_table(0, 100, 2);  // 0 for 100 us, then 2 for 300 us
  c.finalize(400);
  const auto m = c.node_mean_entries();
  CHECK(m[0] == doctest::Approx(1.5));
  CHECK(m[1] == doctest::Approx(4.0));
}

TEST_CASE("overhead windows are half-open") {
  Collector c(2);
  c.record_overhead({0, "DIO", 76, 0});
  c.record_overhead({1, "DAO", 20, 99});
  c.record_overhead({1, "DAO", 20, 100});
  CHECK(c.overhead_bytes() == 116);
  CHECK(c.overhead_bytes(0, 100) == 96);
  CHECK(c.overhead_bytes(100, 200) == 20);
}

TEST_CASE("aggregation rejects mixed configurations") {
  RunMetrics a, b;
  a.config_key = "x";
  b.config_key = "y";
  const std::vector<RunMetrics> runs{a, b};
  CHECK_THROWS_AS(aggregate_runs(runs), std::invalid_argument);
}

TEST_CASE("aggregation pools delay samples") {
  RunMetrics a, b;
  a.deliveries = {{1, 1, 0, 1, 100'000}};
  b.deliveries = {{1, 1, 0, 1, 900'000}, {2, 2, 0, 2, 200'000}};
  a.mean_table_entries = 2.0;
  b.mean_table_entries = 4.0;
  const std::vector<RunMetrics> runs{a, b};
  const auto agg = aggregate_runs(runs);
  CHECK(agg.runs == 2);
  CHECK(agg.pooled.size() == 3);
  CHECK(agg.mean_table_entries.mean == 3.0);
  CHECK(delays_seconds(agg.pooled, 1).size() == 2);
  CHECK(median({5.0, 1.0, 3.0, 2.0}) == 2.5);
}

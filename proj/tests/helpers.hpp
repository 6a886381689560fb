// Hand-built topologies for integration tests.
#pragma once

#include "llnsim/scenario.hpp"

namespace testing {

/// Nodes on a line `spacing` metres apart; node 0 is the sink, the rest alternate
/// between monitoring sensors and actuators.
inline llnsim::Topology line_topology(std::size_t n, double spacing) {
  llnsim::Topology t;
  t.plan = llnsim::FloorPlan::default_house();
  for (std::size_t i = 0; i < n; ++i) {
    t.positions.push_back({spacing * static_cast<double>(i), 0.0});
    t.roles.push_back(i == 0 ? llnsim::NodeRole::sink
                             : (i % 2 == 1 ? llnsim::NodeRole::monitoring_sensor : llnsim::NodeRole::actuator));
  }
  return t;
}

}  // namespace testing

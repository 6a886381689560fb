// RPL storing mode: DODAG formation over DIO/DIS, Trickle, DAO downward routes.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "llnsim/engine.hpp"
#include "llnsim/frame.hpp"
#include "llnsim/rng.hpp"
#include "llnsim/routing.hpp"

namespace llnsim {

inline constexpr std::uint32_t kInfiniteRank = 0xFFFF;

struct RplConfig {
  Duration dio_min = seconds(4);
  Duration dio_max = seconds(1048);
  std::uint32_t redundancy_k = 10;
  std::uint32_t min_hop_rank_increase = 256;
  std::size_t dio_bytes = 76;
  std::size_t dis_bytes = 6;
  std::size_t dao_bytes = 20;
  Duration dis_period = seconds(60);
  /// Downward routes held by a non-root node; the oldest is evicted on overflow.
  std::size_t route_capacity = 20;
  /// Candidate parents remembered per node.
  std::size_t neighbor_table_cap = 8;
  std::uint32_t dao_lifetime_s = 0xFF * 60;
};

/// Trickle interval bookkeeping. Scheduling is left to the owner; this class
/// only holds I, t and c and applies the doubling/reset laws.
class TrickleTimer {
public:
  TrickleTimer(Duration imin, Duration imax, std::uint32_t k) : imin_(imin), imax_(imax), k_(k) {}

  static Duration next_interval(Duration current, Duration imax) {
    return current * 2 < imax ? current * 2 : imax;
  }

  /// Begin an interval of length `interval`: c = 0, t uniform in [I/2, I).
  void begin(Duration interval, RngStream& rng);
  /// Interval expired without inconsistency.
  void expire(RngStream& rng) { begin(next_interval(interval_, imax_), rng); }
  /// Inconsistency heard. Returns true if the interval was shortened to Imin.
  bool reset(RngStream& rng);

  void hear_consistent() { ++counter_; }
  bool should_transmit() const { return counter_ < k_; }

  Duration interval() const { return interval_; }
  Duration fire_point() const { return fire_point_; }
  std::uint32_t counter() const { return counter_; }
  Duration imin() const { return imin_; }
  Duration imax() const { return imax_; }

private:
  Duration imin_;
  Duration imax_;
  std::uint32_t k_;
  Duration interval_ = 0;
  Duration fire_point_ = 0;
  std::uint32_t counter_ = 0;
};

struct DownwardRoute {
  NodeId next_hop;
  SimTime installed_at;
};

class RplRouter final : public Router {
public:
  RplRouter(NodeId self, bool is_root, RouterHost& host, RplConfig cfg, std::uint64_t seed);

  void start() override;
  void send(const DataPacket& packet) override;
  void on_frame(const Frame& frame, NodeId from) override;
  std::size_t table_size() const override;
  std::optional<NodeId> next_hop(NodeId dst) const override { return forward_next_hop(dst); }

  void on_dio(const RplMessage& dio, NodeId from);
  void on_dis(NodeId from);
  void on_dao(const RplMessage& dao, NodeId from);
  /// Send a DAO for this node to the preferred parent. Deferred while unjoined.
  void emit_dao();
  /// Downward entry if one exists, otherwise the preferred parent.
  std::optional<NodeId> forward_next_hop(NodeId dst) const;

  bool is_root() const { return root_; }
  bool joined() const { return root_ || parent_.has_value(); }
  std::uint32_t rank() const { return rank_; }
  std::optional<NodeId> preferred_parent() const { return parent_; }
  const std::map<NodeId, std::uint32_t>& candidates() const { return candidates_; }
  const std::map<NodeId, DownwardRoute>& downward_routes() const { return downward_; }
  const TrickleTimer& trickle() const { return trickle_; }
  std::uint64_t dios_sent() const { return dios_sent_; }
  std::uint64_t dios_suppressed() const { return dios_suppressed_; }
  std::uint64_t daos_sent() const { return daos_sent_; }
  std::uint64_t parent_changes() const { return parent_changes_; }

private:
  void start_trickle(Duration interval);
  void schedule_trickle_events();
  void on_trickle_fire();
  void on_trickle_expire();
  void send_dio(NodeId link_dst);
  void schedule_dis();
  void remember_candidate(NodeId from, std::uint32_t rank);
  void install_downward(NodeId target, NodeId via);

  NodeId self_;
  bool root_;
  RouterHost& host_;
  RplConfig cfg_;
  RngStream rng_;
  TrickleTimer trickle_;
  SimTime interval_start_ = 0;
  EventHandle fire_event_;
  EventHandle expire_event_;
  EventHandle dis_event_;

  std::uint32_t rank_ = kInfiniteRank;
  std::optional<NodeId> parent_;
  std::map<NodeId, std::uint32_t> candidates_;
  std::map<NodeId, DownwardRoute> downward_;
  bool started_ = false;

  std::uint64_t dios_sent_ = 0;
  std::uint64_t dios_suppressed_ = 0;
  std::uint64_t daos_sent_ = 0;
  std::uint64_t parent_changes_ = 0;
};

}  // namespace llnsim

// Counter-based random streams keyed by (run seed, node, purpose).
#pragma once

#include <cstdint>

#include "llnsim/engine.hpp"

namespace llnsim {

/// What a stream is used for. Part of the stream key so that draws for one
/// purpose never shift the sequence seen by another.
enum class StreamPurpose : std::uint64_t {
  topology = 1,
  traffic = 2,
  mac = 3,
  radio = 4,
  trickle = 5,
  routing = 6,
  events = 7,
  bursts = 8,
};

/// SplitMix64 output function over (key, counter). Two streams with the same
/// id always yield the same sequence, on every platform.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  /// Uniform duration in [lo, hi). Returns lo when hi <= lo.
  Duration uniform_duration(Duration lo, Duration hi);
  /// Exponential with the given mean.
  double exponential(double mean);
  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t draws() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace llnsim

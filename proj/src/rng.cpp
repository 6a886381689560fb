#include "llnsim/rng.hpp"

#include <cmath>
#include <limits>

namespace llnsim {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose)
    : key_(mix64(mix64(mix64(seed + kGolden) ^ (node + 1) * kGolden) ^
                 static_cast<std::uint64_t>(purpose))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return next_u64();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + x % range;
}

Duration RngStream::uniform_duration(Duration lo, Duration hi) {
  if (hi <= lo) return lo;
  return uniform_int(lo, hi - 1);
}

double RngStream::exponential(double mean) {
  return -mean * std::log1p(-uniform01());
}

}  // namespace llnsim

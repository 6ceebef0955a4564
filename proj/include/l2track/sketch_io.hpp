#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l2track/count_sketch.hpp"
#include "l2track/median_tracker.hpp"

namespace l2track {

/// Checkpoint blob, little-endian:
///   magic "L2TK" | version u16 | k u64 | r u64 | r x { seed u64, k x i64 }.
/// A plain CountSketch serializes as r = 1. Only seed-constructed sketches
/// can be serialized (fixture hashes are not captured by the format).
std::vector<std::uint8_t> serialize(const CountSketch<i64>& sketch);
std::vector<std::uint8_t> serialize(const MedianTracker<i64>& tracker);

/// Rebuilds hashes from the stored seeds and restores the counters.
MedianTracker<i64> deserialize_tracker(std::span<const std::uint8_t> blob);

/// Requires r == 1.
CountSketch<i64> deserialize_count_sketch(std::span<const std::uint8_t> blob);

}  // namespace l2track

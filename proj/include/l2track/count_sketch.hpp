#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "l2track/detail/common.hpp"
#include "l2track/hash.hpp"

namespace l2track {

/// CountSketch (Charikar, Chen, Farach-Colton): one signed unit entry per
/// column. An update touches exactly one counter, so the cost per item does
/// not depend on the number of rows. The l2 estimate is the squared norm of
/// the counter vector, maintained incrementally in 128-bit integers.
///
/// Counter is signed 64-bit by default; magnitudes above 2^62 raise an
/// overflow error (the stream is too long for the counter width). A wider
/// instantiation (Counter = i128) is available for streams whose length
/// itself approaches 2^62.
///
/// Single-writer: updates must be serialized externally. Distinct instances
/// share nothing.
template <class Counter = i64>
class CountSketch {
 public:
  /// Bucket hash and sign hash are drawn from sub-seeds of `seed`.
  CountSketch(u64 k, u64 seed)
      : CountSketch(KWiseHash::sample(k, detail::derive_seed(seed, 0)),
                    KWiseHash::sample(2, detail::derive_seed(seed, 1))) {
    seed_ = seed;
  }

  /// Explicit hash pair, for fixtures and forced-collision setups.
  /// The row count is bucket_hash.range().
  CountSketch(KWiseHash bucket_hash, KWiseHash sign_hash)
      : h_(std::move(bucket_hash)), g_(std::move(sign_hash)),
        counters_(h_.range(), Counter{0}) {
    if (g_.range() != 2)
      throw std::invalid_argument("CountSketch: sign hash must have range 2");
  }

  void update(u64 item) { update(item, 1); }

  /// Applies `count` repeated insertions of `item` in one counter write
  /// (the sketch is linear in the frequency vector).
  void update(u64 item, u64 count) {
    if (item >= KWiseHash::kPrime)
      throw std::invalid_argument("CountSketch: item outside id range");
    if (count == 0) return;
    const u64 j = h_(item);
    const int s = g_.sign(item);
    const Counter old = counters_[j];
    const i128 next = static_cast<i128>(old) +
                      (s > 0 ? static_cast<i128>(count) : -static_cast<i128>(count));
    if (next > kMaxMagnitude || next < -kMaxMagnitude)
      throw std::overflow_error("CountSketch: counter magnitude exceeds width; stream too long");
    counters_[j] = static_cast<Counter>(next);
    norm_sq_ -= square(old);
    norm_sq_ += square(counters_[j]);
    ++writes_;
  }

  /// Estimate of ||f||_2^2: the exact 128-bit sum of squared counters,
  /// converted to double.
  double estimate() const { return detail::to_double(norm_sq_); }

  /// Exact sum of squared counters.
  u128 estimate_sq() const { return norm_sq_; }

  u64 rows() const { return counters_.size(); }
  std::span<const Counter> counters() const { return counters_; }
  const KWiseHash& bucket_hash() const { return h_; }
  const KWiseHash& sign_hash() const { return g_; }

  /// Construction seed, absent for fixture-built sketches.
  std::optional<u64> seed() const { return seed_; }

  /// Total counter writes so far (exactly one per update).
  u64 counter_writes() const { return writes_; }

  /// Replaces the counter table, e.g. when restoring a checkpoint.
  void restore_counters(std::span<const Counter> values) {
    if (values.size() != counters_.size())
      throw std::invalid_argument("CountSketch: counter count mismatch");
    norm_sq_ = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (values[j] > kMaxMagnitude || values[j] < -kMaxMagnitude)
        throw std::invalid_argument("CountSketch: restored counter out of range");
      counters_[j] = values[j];
      norm_sq_ += square(values[j]);
    }
  }

 private:
  // 2^62 for the 64-bit default; effectively unbounded for i128.
  static constexpr i128 kMaxMagnitude =
      sizeof(Counter) == 8 ? (i128{1} << 62) : (i128{1} << 120);

  static u128 square(Counter c) {
    const u128 mag = c < 0 ? static_cast<u128>(-static_cast<i128>(c))
                           : static_cast<u128>(static_cast<i128>(c));
    return mag * mag;
  }

  KWiseHash h_;
  KWiseHash g_;
  std::vector<Counter> counters_;
  u128 norm_sq_ = 0;
  u64 writes_ = 0;
  std::optional<u64> seed_;
};

}  // namespace l2track

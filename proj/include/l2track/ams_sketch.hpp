#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "l2track/detail/common.hpp"
#include "l2track/hash.hpp"

namespace l2track {

/// AMS sketch (Alon, Matias, Szegedy): every row holds a +-1 sign per item,
/// so an update writes all k accumulators. The 1/sqrt(k) normalization is
/// applied at estimation time, keeping the accumulators integral.
///
/// Row signs come from one of three sources:
///  - kPerRowHash (default): one 8-wise independent hash per row.
///  - kIndependent: a stateless per-(row, item) PRF, emulating fully
///    independent Rademacher entries for lower-bound experiments.
///  - an explicit sign table (test fixture).
class AmsSketch {
 public:
  enum class SignMode { kPerRowHash, kIndependent };

  AmsSketch(u64 k, u64 seed, SignMode mode = SignMode::kPerRowHash)
      : mode_(mode), accumulators_(check_rows(k), i64{0}) {
    if (mode_ == SignMode::kPerRowHash) {
      row_hashes_.reserve(k);
      for (u64 j = 0; j < k; ++j)
        row_hashes_.push_back(KWiseHash::sample(2, detail::derive_seed(seed, j)));
    } else {
      row_keys_.reserve(k);
      for (u64 j = 0; j < k; ++j) row_keys_.push_back(detail::derive_seed(seed, j));
    }
  }

  /// Fixture with explicit signs; table[j][i] in {-1, +1} is row j's sign
  /// for item i. Items at or beyond the table width are rejected.
  static AmsSketch with_sign_table(std::vector<std::vector<int>> table) {
    if (table.empty()) throw std::invalid_argument("AmsSketch: empty sign table");
    AmsSketch s(table.size());
    for (const auto& row : table) {
      if (row.size() != table[0].size())
        throw std::invalid_argument("AmsSketch: ragged sign table");
      for (int v : row)
        if (v != 1 && v != -1)
          throw std::invalid_argument("AmsSketch: sign table entries must be +-1");
    }
    s.table_ = std::move(table);
    return s;
  }

  void update(u64 item) {
    if (item >= KWiseHash::kPrime)
      throw std::invalid_argument("AmsSketch: item outside id range");
    const u64 k = accumulators_.size();
    for (u64 j = 0; j < k; ++j) {
      const i64 next = accumulators_[j] + sign(j, item);  // |old| <= 2^62, no wrap
      if (next > kMaxMagnitude64 || next < -kMaxMagnitude64)
        throw std::overflow_error("AmsSketch: accumulator magnitude exceeds width");
      accumulators_[j] = next;
    }
    writes_ += k;
  }

  /// `count` repeated insertions; every accumulator moves by +-count.
  void update(u64 item, u64 count) {
    if (count == 1) {
      update(item);
      return;
    }
    if (item >= KWiseHash::kPrime)
      throw std::invalid_argument("AmsSketch: item outside id range");
    if (count == 0) return;
    const u64 k = accumulators_.size();
    for (u64 j = 0; j < k; ++j) {
      const i128 next = static_cast<i128>(accumulators_[j]) +
                        (sign(j, item) > 0 ? static_cast<i128>(count)
                                           : -static_cast<i128>(count));
      if (next > kMaxMagnitude64 || next < -kMaxMagnitude64)
        throw std::overflow_error("AmsSketch: accumulator magnitude exceeds width");
      accumulators_[j] = static_cast<i64>(next);
    }
    writes_ += k;
  }

  /// (1/k) * sum of squared accumulators. An O(k) scan, the same order as
  /// one update.
  double estimate() const {
    u128 norm_sq = 0;
    for (i64 a : accumulators_) norm_sq += square(a);
    return detail::to_double(norm_sq) / static_cast<double>(accumulators_.size());
  }

  /// Row j's sign for `item`.
  int sign(u64 j, u64 item) const {
    if (!table_.empty()) {
      if (item >= table_[0].size())
        throw std::invalid_argument("AmsSketch: item beyond sign table width");
      return table_[j][item];
    }
    if (mode_ == SignMode::kPerRowHash) return row_hashes_[j].sign(item);
    // SplitMix64 stream keyed per row; top bit as the Rademacher value.
    return (detail::mix64(row_keys_[j] + item * detail::kGolden) >> 63) ? +1 : -1;
  }

  u64 rows() const { return accumulators_.size(); }
  std::span<const i64> accumulators() const { return accumulators_; }
  u64 counter_writes() const { return writes_; }

 private:
  static constexpr i64 kMaxMagnitude64 = i64{1} << 62;

  static u64 check_rows(u64 k) {
    if (k < 1) throw std::invalid_argument("AmsSketch: need at least one row");
    return k;
  }

  explicit AmsSketch(std::size_t k)
      : mode_(SignMode::kPerRowHash), accumulators_(check_rows(k), i64{0}) {}

  static u128 square(i64 c) {
    const u128 mag = c < 0 ? static_cast<u128>(-static_cast<i128>(c)) : static_cast<u128>(c);
    return mag * mag;
  }

  SignMode mode_;
  std::vector<i64> accumulators_;
  std::vector<KWiseHash> row_hashes_;  // kPerRowHash
  std::vector<u64> row_keys_;          // kIndependent
  std::vector<std::vector<int>> table_;
  u64 writes_ = 0;
};

}  // namespace l2track

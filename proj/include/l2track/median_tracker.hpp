#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "l2track/count_sketch.hpp"
#include "l2track/detail/common.hpp"

namespace l2track {

/// Median of an odd number of values (the middle order statistic).
inline double median_of(std::vector<double> values) {
  if (values.empty() || values.size() % 2 == 0)
    throw std::invalid_argument("median_of: need an odd, non-empty value list");
  const auto mid = values.begin() + values.size() / 2;
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

/// Default replica count for failure probability delta: 2*ceil(ln(1/delta))+1,
/// forced odd.
inline u64 default_replicas(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("default_replicas: delta must be in (0,1)");
  u64 r = 2 * static_cast<u64>(std::ceil(std::log(1.0 / delta))) + 1;
  if (r % 2 == 0) ++r;
  return std::max<u64>(r, 1);
}

/// r independently seeded CountSketch replicas; the estimate is the median
/// of the replica estimates. An update writes one counter per replica, so
/// the per-item cost is r, independent of k.
///
/// Replica i is seeded with derive_seed(seed, i); distinct lanes give
/// distinct sub-seeds.
template <class Counter = i64>
class MedianTracker {
 public:
  MedianTracker(u64 k, u64 r, u64 seed) : seed_(seed) {
    if (r < 1 || r % 2 == 0)
      throw std::invalid_argument("MedianTracker: replica count must be odd and >= 1");
    replicas_.reserve(r);
    for (u64 i = 0; i < r; ++i)
      replicas_.emplace_back(k, detail::derive_seed(seed, i));
  }

  /// Assembles a tracker from existing replicas (checkpoint restore).
  explicit MedianTracker(std::vector<CountSketch<Counter>> replicas)
      : replicas_(std::move(replicas)) {
    if (replicas_.empty() || replicas_.size() % 2 == 0)
      throw std::invalid_argument("MedianTracker: replica count must be odd and >= 1");
    for (const auto& rep : replicas_)
      if (rep.rows() != replicas_[0].rows())
        throw std::invalid_argument("MedianTracker: replicas must share k");
  }

  void update(u64 item) { update(item, 1); }

  void update(u64 item, u64 count) {
    for (auto& rep : replicas_) rep.update(item, count);
  }

  double estimate() const {
    std::vector<double> values;
    values.reserve(replicas_.size());
    for (const auto& rep : replicas_) values.push_back(rep.estimate());
    return median_of(std::move(values));
  }

  u64 rows() const { return replicas_[0].rows(); }
  u64 replica_count() const { return replicas_.size(); }
  const std::vector<CountSketch<Counter>>& replicas() const { return replicas_; }
  std::optional<u64> seed() const { return seed_; }

  u64 counter_writes() const {
    u64 total = 0;
    for (const auto& rep : replicas_) total += rep.counter_writes();
    return total;
  }

 private:
  std::vector<CountSketch<Counter>> replicas_;
  std::optional<u64> seed_;
};

}  // namespace l2track

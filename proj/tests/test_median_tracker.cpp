#include <doctest.h>

#include <algorithm>
#include <vector>

#include "l2track/median_tracker.hpp"
#include "l2track/stream.hpp"

using namespace l2track;

TEST_CASE("median is the middle order statistic") {
  CHECK(median_of({1, 2, 100}) == 2.0);
  CHECK(median_of({5}) == 5.0);
  // Sort-based oracle: {3,1,2,9,4} -> {1,2,3,4,9} -> 3.
  CHECK(median_of({3, 1, 2, 9, 4}) == 3.0);
}

TEST_CASE("median rejects empty or even-sized lists") {
  CHECK_THROWS_AS(median_of({}), std::invalid_argument);
  CHECK_THROWS_AS(median_of({1, 2}), std::invalid_argument);
}

TEST_CASE("default replica counts") {
  CHECK(default_replicas(0.01) == 11);  // 2*ceil(ln 100) + 1
  CHECK(default_replicas(0.25) == 5);
  CHECK(default_replicas(0.5) == 3);
  CHECK_THROWS_AS(default_replicas(0.0), std::invalid_argument);
  CHECK_THROWS_AS(default_replicas(1.0), std::invalid_argument);
}

TEST_CASE("replica counts must be odd and positive") {
  CHECK_THROWS_AS(MedianTracker<>(8, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(MedianTracker<>(8, 2, 1), std::invalid_argument);
  CHECK_NOTHROW(MedianTracker<>(8, 1, 1));
}

TEST_CASE("a one-replica tracker is a plain CountSketch") {
  const u64 seed = 40;
  MedianTracker<> tracker(16, 1, seed);
  CountSketch<> plain(16, detail::derive_seed(seed, 0));
  const Stream s = gen_uniform(30, 400, 6);
  for (const Run& r : s.runs) {
    tracker.update(r.item, r.count);
    plain.update(r.item, r.count);
  }
  CHECK(tracker.estimate() == plain.estimate());
  CHECK(std::equal(tracker.replicas()[0].counters().begin(),
                   tracker.replicas()[0].counters().end(), plain.counters().begin()));
}

TEST_CASE("replica seeds are pairwise distinct") {
  MedianTracker<> tracker(4, 11, 123);
  std::vector<u64> seeds;
  for (const auto& rep : tracker.replicas()) seeds.push_back(*rep.seed());
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("a single-item stream is exact in every replica") {
  MedianTracker<> tracker(8, 3, 5);
  tracker.update(77, 6);
  CHECK(tracker.estimate() == 36.0);
}

TEST_CASE("one tracker update writes exactly r counters") {
  MedianTracker<> tracker(100, 5, 9);
  tracker.update(4);
  CHECK(tracker.counter_writes() == 5);
}

TEST_CASE("the estimate is the median of the replica estimates") {
  MedianTracker<> tracker(8, 5, 77);
  const Stream s = gen_uniform(40, 600, 13);
  for (const Run& r : s.runs) tracker.update(r.item, r.count);
  std::vector<double> values;
  for (const auto& rep : tracker.replicas()) values.push_back(rep.estimate());
  std::sort(values.begin(), values.end());
  CHECK(tracker.estimate() == values[2]);
}

#pragma once

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2track/detail/common.hpp"

namespace l2track {

struct BenchConfig {
  u64 warmup_batches = 3;
  u64 timed_batches = 10;
  u64 batch_size = 1'000'000;
  u64 universe = u64{1} << 20;
  u64 seed = 0;
};

struct BenchResult {
  std::string estimator;
  u64 k = 0;
  u64 r = 0;
  double eps = 0.0;
  double ns_per_update = 0.0;
  u64 ops_per_update = 0;
};

/// Deterministic counter-write count per update, measured on a fresh
/// instance. The count is an exact invariant of the estimator (1 for
/// CountSketch, r for the median tracker, k for AMS), so it must divide
/// evenly.
template <class MakeEstimator>
u64 measured_ops_per_update(MakeEstimator&& make, u64 probe_updates = 128) {
  auto est = make();
  for (u64 i = 0; i < probe_updates; ++i) est.update(1 + (detail::mix64(i) & 0xffff));
  const u64 writes = est.counter_writes();
  if (writes % probe_updates != 0)
    throw std::logic_error("bench: counter writes not an exact per-update invariant");
  return writes / probe_updates;
}

/// Median wall-clock nanoseconds per update over timed batches, with the
/// item generation (a SplitMix64 stream over `universe`) inside the timed
/// region for every estimator alike.
template <class MakeEstimator>
BenchResult bench_estimator(const std::string& name, u64 k, u64 r, double eps,
                            const BenchConfig& config, MakeEstimator&& make) {
  if (config.timed_batches < 1 || config.batch_size < 1)
    throw std::invalid_argument("bench: need at least one timed batch and a positive batch size");

  auto est = make();
  u64 word = config.seed;
  volatile double sink = 0.0;

  auto run_batch = [&] {
    for (u64 i = 0; i < config.batch_size; ++i) {
      word += detail::kGolden;
      est.update(1 + detail::mix64(word) % config.universe);
    }
    sink = sink + est.estimate();
  };

  for (u64 b = 0; b < config.warmup_batches; ++b) run_batch();

  std::vector<double> batch_ns(config.timed_batches);
  for (u64 b = 0; b < config.timed_batches; ++b) {
    const auto start = std::chrono::steady_clock::now();
    run_batch();
    const auto stop = std::chrono::steady_clock::now();
    batch_ns[b] = std::chrono::duration<double, std::nano>(stop - start).count();
  }
  std::sort(batch_ns.begin(), batch_ns.end());
  const double median_ns = batch_ns[batch_ns.size() / 2];

  BenchResult result;
  result.estimator = name;
  result.k = k;
  result.r = r;
  result.eps = eps;
  result.ns_per_update = median_ns / static_cast<double>(config.batch_size);
  result.ops_per_update = measured_ops_per_update(make);
  return result;
}

}  // namespace l2track

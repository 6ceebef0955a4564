#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "l2track/detail/common.hpp"
#include "l2track/frequency_oracle.hpp"
#include "l2track/parallel.hpp"
#include "l2track/stream.hpp"

namespace l2track {

/// Which normalization bounds the deviation: the final squared norm (weak)
/// or the current one (strong).
enum class TrackMode { kWeak, kStrong };

/// When the estimate is compared against the truth.
struct EvalPolicy {
  enum class Kind { kEveryStep, kDyadic, kExplicit };

  Kind kind = Kind::kEveryStep;
  std::vector<u64> times;  // kExplicit only

  static EvalPolicy every_step() { return {}; }

  static EvalPolicy dyadic() { return {Kind::kDyadic, {}}; }

  static EvalPolicy at_times(std::vector<u64> t) {
    if (t.empty()) throw std::invalid_argument("EvalPolicy: empty time list");
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.front() < 1) throw std::invalid_argument("EvalPolicy: times must be >= 1");
    return {Kind::kExplicit, std::move(t)};
  }

  /// The checkpoint list for a stream of the given length; kEveryStep is
  /// handled without materialization and returns empty here.
  std::vector<u64> checkpoint_times(u64 length) const {
    switch (kind) {
      case Kind::kEveryStep:
        return {};
      case Kind::kDyadic: {
        // t_i = 2^i - 1 below the final time, which is always included.
        std::vector<u64> t;
        for (u64 v = 1; v < length;) {
          t.push_back(v);
          if (v >= length / 2) break;  // next value would reach or pass the end
          v = 2 * v + 1;
        }
        if (t.empty() || t.back() != length) t.push_back(length);
        return t;
      }
      case Kind::kExplicit:
        if (times.back() > length)
          throw std::invalid_argument("EvalPolicy: checkpoint beyond stream end");
        return times;
    }
    throw std::invalid_argument("EvalPolicy: unknown kind");
  }
};

struct TracePoint {
  u64 t;
  double estimate;
  double truth;
  double normalized_error;
};

struct TrackingReport {
  TrackMode mode = TrackMode::kWeak;
  double sup_error = 0.0;
  u64 argmax_t = 0;
  u64 evaluated = 0;
  EvalPolicy::Kind policy = EvalPolicy::Kind::kEveryStep;
  std::vector<TracePoint> trace;  // filled only when requested
};

/// Exact ||f^(t)||_2^2 at each evaluation point, plus the final norm.
struct TruthTrajectory {
  std::vector<double> values;
  double final_norm_sq = 0.0;
};

namespace detail {

/// Drives `est` through the stream, invoking visit(t) at each evaluation
/// point. Checkpoints may fall inside a run; the run is split there.
template <class Estimator, class Visitor>
void run_stream(const Stream& s, Estimator& est, const EvalPolicy& policy, Visitor&& visit) {
  if (s.length == 0) throw std::invalid_argument("run_stream: empty stream");
  if (policy.kind == EvalPolicy::Kind::kEveryStep) {
    u64 t = 0;
    for (const Run& r : s.runs)
      for (u64 c = 0; c < r.count; ++c) {
        est.update(r.item);
        visit(++t);
      }
    return;
  }
  const std::vector<u64> cps = policy.checkpoint_times(s.length);
  std::size_t next = 0;
  u64 t = 0;
  for (const Run& r : s.runs) {
    u64 remaining = r.count;
    while (next < cps.size() && cps[next] <= t + remaining) {
      const u64 step = cps[next] - t;
      if (step > 0) est.update(r.item, step);
      t += step;
      remaining -= step;
      visit(t);
      ++next;
    }
    if (remaining > 0) {
      est.update(r.item, remaining);
      t += remaining;
    }
  }
}

}  // namespace detail

/// Exact truths along the policy's evaluation points, computed once so that
/// repeated trials over the same stream do not re-run the oracle.
inline TruthTrajectory oracle_trajectory(const Stream& s, const EvalPolicy& policy) {
  FrequencyOracle oracle;
  TruthTrajectory out;
  detail::run_stream(s, oracle, policy, [&](u64) { out.values.push_back(oracle.estimate()); });
  // run_stream consumes the whole stream, including any tail past the last
  // checkpoint, so the oracle now holds ||f^(m)||^2.
  out.final_norm_sq = oracle.estimate();
  return out;
}

/// Runs `est` against precomputed truths. In weak mode raw deviations are
/// kept and normalized by the final squared norm after the pass; in strong
/// mode each deviation is normalized by the current truth (zero-truth
/// points are skipped).
template <class Estimator>
TrackingReport track_against(const Stream& s, Estimator& est, TrackMode mode,
                             const EvalPolicy& policy, const TruthTrajectory& truth,
                             bool want_trace = false) {
  TrackingReport report;
  report.mode = mode;
  report.policy = policy.kind;

  double sup_raw = -1.0;  // weak: raw deviation; strong: normalized
  std::size_t idx = 0;
  detail::run_stream(s, est, policy, [&](u64 t) {
    const double tv = truth.values[idx++];
    const double dev = std::fabs(est.estimate() - tv);
    ++report.evaluated;
    if (mode == TrackMode::kStrong) {
      if (tv == 0.0) return;
      const double err = dev / tv;
      if (want_trace) report.trace.push_back({t, est.estimate(), tv, err});
      if (err > sup_raw) {
        sup_raw = err;
        report.argmax_t = t;
      }
    } else {
      if (want_trace) report.trace.push_back({t, est.estimate(), tv, dev});
      if (dev > sup_raw) {
        sup_raw = dev;
        report.argmax_t = t;
      }
    }
  });

  if (sup_raw < 0.0) sup_raw = 0.0;  // e.g. strong mode with all-zero truths
  if (mode == TrackMode::kWeak) {
    const double denom = truth.final_norm_sq;
    report.sup_error = denom > 0.0 ? sup_raw / denom : 0.0;
    if (want_trace)
      for (auto& p : report.trace) p.normalized_error = denom > 0.0 ? p.normalized_error / denom : 0.0;
  } else {
    report.sup_error = sup_raw;
  }
  return report;
}

/// Single tracking run: feeds the stream to `est` and an exact oracle and
/// returns the supremum normalized deviation under the given mode.
template <class Estimator>
TrackingReport track_run(const Stream& s, Estimator& est, TrackMode mode,
                         const EvalPolicy& policy = EvalPolicy::every_step(),
                         bool want_trace = false) {
  if (s.length == 0) throw std::invalid_argument("track_run: empty stream");
  const TruthTrajectory truth = oracle_trajectory(s, policy);
  return track_against(s, est, mode, policy, truth, want_trace);
}

struct FailureStats {
  u64 trials = 0;
  u64 failures = 0;
  double fraction = 0.0;
  std::vector<double> sup_errors;        // by trial index
  std::vector<u64> argmax_ts;            // by trial index
  std::vector<TrackingReport> reports;   // filled when traces were requested

  /// Index of the trial with the largest sup error.
  u64 worst_trial() const {
    u64 worst = 0;
    for (u64 i = 1; i < sup_errors.size(); ++i)
      if (sup_errors[i] > sup_errors[worst]) worst = i;
    return worst;
  }
};

/// Monte Carlo failure probability: T independent runs with estimator seeds
/// base_seed + 0 .. base_seed + T-1; a trial fails when its sup error
/// exceeds eps. Trials may run concurrently; output is index-ordered and
/// identical for any thread count.
template <class Factory>
FailureStats failure_probability(const Stream& s, Factory&& make_estimator, double eps,
                                 TrackMode mode, u64 trials, u64 base_seed,
                                 const EvalPolicy& policy = EvalPolicy::every_step(),
                                 unsigned threads = 1, bool want_traces = false) {
  if (trials < 1) throw std::invalid_argument("failure_probability: trials must be >= 1");
  if (s.length == 0) throw std::invalid_argument("failure_probability: empty stream");
  const TruthTrajectory truth = oracle_trajectory(s, policy);

  FailureStats stats;
  stats.trials = trials;
  stats.sup_errors.assign(trials, 0.0);
  stats.argmax_ts.assign(trials, 0);
  if (want_traces) stats.reports.resize(trials);

  parallel_for(trials, threads, [&](u64 i) {
    auto est = make_estimator(base_seed + i);
    TrackingReport r = track_against(s, est, mode, policy, truth, want_traces);
    stats.sup_errors[i] = r.sup_error;
    stats.argmax_ts[i] = r.argmax_t;
    if (want_traces) stats.reports[i] = std::move(r);
  });

  for (double e : stats.sup_errors)
    if (e > eps) ++stats.failures;
  stats.fraction = static_cast<double>(stats.failures) / static_cast<double>(trials);
  return stats;
}

}  // namespace l2track

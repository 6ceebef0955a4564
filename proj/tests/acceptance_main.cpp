// Acceptance suite: one line per criterion, hard criteria gate the exit
// code, soft (machine-dependent) timing checks are reported but never fail
// the run. Thresholds are fixed here; calibrated constants are listed in
// README.md's calibration table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "l2track/ams_sketch.hpp"
#include "l2track/bench.hpp"
#include "l2track/count_sketch.hpp"
#include "l2track/epsnet.hpp"
#include "l2track/frequency_oracle.hpp"
#include "l2track/frobenius.hpp"
#include "l2track/median_tracker.hpp"
#include "l2track/stream.hpp"
#include "l2track/tracking.hpp"

namespace {

using namespace l2track;

constexpr unsigned kThreads = 2;

int failures_total = 0;

void report(int index, bool pass, const std::string& name, const std::string& details) {
  std::printf("[%2d] %s %s (%s)\n", index, pass ? "PASS" : "FAIL", name.c_str(),
              details.c_str());
  std::fflush(stdout);
  if (!pass) ++failures_total;
}

void report_soft(const std::string& text) {
  std::printf("     soft: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. One-shot estimation: CountSketch with k = ceil(2/(eps^2 delta)).

void criterion_one_shot() {
  const double eps = 0.2, delta = 0.25;
  const u64 k = static_cast<u64>(std::ceil(2.0 / (eps * eps * delta)));
  const Stream s = gen_uniform(u64{1} << 14, 100000, 101);
  const u64 trials = 400;
  const FailureStats stats = failure_probability(
      s, [k](u64 seed) { return CountSketch<>(k, seed); }, eps, TrackMode::kWeak, trials,
      1000, EvalPolicy::at_times({s.length}), kThreads);
  const double budget = delta + 3.0 * std::sqrt(delta * (1 - delta) / trials);
  report(1, stats.fraction <= budget, "one-shot estimation failure fraction",
         "k=" + std::to_string(k) + " fraction=" + fmt(stats.fraction) +
             " budget=" + fmt(budget));
}

// ---------------------------------------------------------------------------
// 2. Weak tracking, every-step supremum, same configuration.

void criterion_weak_tracking() {
  const double eps = 0.2, delta = 0.25;
  const u64 k = static_cast<u64>(std::ceil(2.0 / (eps * eps * delta)));
  const Stream s = gen_uniform(u64{1} << 14, 100000, 101);
  const u64 trials = 400;
  const FailureStats stats = failure_probability(
      s, [k](u64 seed) { return CountSketch<>(k, seed); }, eps, TrackMode::kWeak, trials,
      2000, EvalPolicy::every_step(), kThreads);
  const double budget = 0.35;  // delta plus the weak-vs-one-shot slack
  report(2, stats.fraction <= budget, "weak tracking failure fraction",
         "fraction=" + fmt(stats.fraction) + " budget=" + fmt(budget));
}

// ---------------------------------------------------------------------------
// 3. Median trick: r=11 replicas of k = ceil(8/eps^2).

void criterion_median_trick() {
  const double eps = 0.2;
  const u64 k = static_cast<u64>(std::ceil(8.0 / (eps * eps)));
  const u64 r = 11;
  const u64 trials = 300;
  bool ok = true;
  std::string details = "k=" + std::to_string(k) + " r=" + std::to_string(r);
  const Stream uniform = gen_uniform(u64{1} << 14, 100000, 103);
  const Stream zipf = gen_zipf(u64{1} << 14, 100000, 1.1, 104);
  u64 base = 3000;
  const std::pair<const char*, const Stream*> cases[] = {{"uniform", &uniform},
                                                         {"zipf", &zipf}};
  for (const auto& [name, stream] : cases) {
    const FailureStats stats = failure_probability(
        *stream, [k, r](u64 seed) { return MedianTracker<>(k, r, seed); }, eps,
        TrackMode::kWeak, trials, base, EvalPolicy::every_step(), kThreads);
    details += std::string(" ") + name + "=" + fmt(stats.fraction);
    ok = ok && stats.fraction <= 0.05;
    base += 500;
  }
  report(3, ok, "median tracker weak tracking failure fraction", details + " budget=0.05");
}

// ---------------------------------------------------------------------------
// 4. Frobenius statistic of the collision matrix, Monte Carlo vs exact.

void criterion_frobenius_monte_carlo() {
  std::mt19937_64 gen(4001);
  std::vector<double> x(1000);
  for (double& v : x) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;

  const u64 trials = 10000;
  bool ok = true;
  std::string details;
  for (u64 k : {u64{16}, u64{256}}) {
    const FrobeniusStats stats = frobenius_stat(x, k, trials, 40000 + k, kThreads);
    double var = 0.0;
    for (double f2 : stats.f2_samples)
      var += (f2 - stats.mean_f2) * (f2 - stats.mean_f2);
    var /= (trials - 1);
    const double se = std::sqrt(var / trials);
    const double exact = frobenius_mean_exact(x, k);
    const bool mean_close = std::fabs(stats.mean_f2 - exact) <= 3.0 * se;
    const bool mean_bounded = stats.mean_f2 <= norm_sq * norm_sq / static_cast<double>(k);
    bool tails_ok = true;
    for (double delta : {0.1, 0.5}) {
      const double theta = std::sqrt(2.0) * norm_sq / std::sqrt(delta * static_cast<double>(k));
      const double budget =
          delta / 2.0 + 3.0 * std::sqrt(delta / 2.0 * (1 - delta / 2.0) / trials);
      tails_ok = tails_ok && stats.tail_fraction(theta) <= budget;
    }
    ok = ok && mean_close && mean_bounded && tails_ok;
    details += "k=" + std::to_string(k) +
               ": |mean-exact|=" + fmt(std::fabs(stats.mean_f2 - exact)) +
               " 3se=" + fmt(3.0 * se) + "; ";
  }
  report(4, ok, "Frobenius statistic mean and tail", details);
}

// ---------------------------------------------------------------------------
// 5. Exhaustive small-instance expectation, exact integer arithmetic.

u128 pair_sum_for_assignment(const std::vector<u64>& x, const std::vector<u64>& buckets) {
  u128 total = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j || buckets[i] != buckets[j]) continue;
      total += static_cast<u128>(x[i]) * x[i] * x[j] * x[j];
    }
  return total;
}

u128 pair_sum_all(const std::vector<u64>& x) {
  u128 total = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (i != j) total += static_cast<u128>(x[i]) * x[i] * x[j] * x[j];
  return total;
}

void criterion_exhaustive_frobenius() {
  u64 checked = 0;
  bool ok = true;
  // Every vector with 1..4 coordinates over {1,2,3}, every k in 1..3.
  for (std::size_t n = 1; n <= 4 && ok; ++n) {
    std::vector<u64> x(n, 1);
    for (;;) {
      for (u64 k = 1; k <= 3; ++k) {
        u64 assignments = 1;
        for (std::size_t i = 0; i < n; ++i) assignments *= k;
        u128 enum_total = 0;
        double f2_total = 0.0;
        std::vector<u64> buckets(n, 0);
        const std::vector<double> xd(x.begin(), x.end());
        for (u64 code = 0; code < assignments; ++code) {
          u64 rest = code;
          for (std::size_t i = 0; i < n; ++i) {
            buckets[i] = rest % k;
            rest /= k;
          }
          enum_total += pair_sum_for_assignment(x, buckets);
          f2_total += frobenius_f2(xd, buckets, k);
        }
        u64 per_pair = 1;
        for (std::size_t i = 0; i + 1 < n; ++i) per_pair *= k;
        ok = ok && enum_total == per_pair * pair_sum_all(x);
        ok = ok && f2_total == static_cast<double>(static_cast<u64>(enum_total));
        ok = ok && frobenius_mean_exact(xd, 1) ==
                       static_cast<double>(static_cast<u64>(pair_sum_all(x)));
        ++checked;
      }
      std::size_t pos = 0;  // next vector over {1,2,3}
      while (pos < n && x[pos] == 3) x[pos++] = 1;
      if (pos == n) break;
      ++x[pos];
    }
  }
  report(5, ok, "exhaustive small-instance Frobenius expectation",
         std::to_string(checked) + " (vector,k) pairs, exact equality");
}

// ---------------------------------------------------------------------------
// 6. Greedy epsilon-net: coverage and size bound on 200 random streams.

void criterion_epsnet() {
  u64 word = 606;
  auto next = [&word] { return detail::mix64(word += detail::kGolden); };
  u64 nets = 0, covered = 0, bounded = 0;
  for (int i = 0; i < 200; ++i) {
    const u64 n = 1 + next() % 100;
    const u64 m = 1 + next() % 5000;
    const Stream s = gen_uniform(n, m, next());
    for (double rel : {0.05, 0.1, 0.3}) {
      const EpsNet net = greedy_net_relative(s, rel);
      const NetCheck check = verify_net(s, net);
      ++nets;
      if (check.covered) ++covered;
      if (static_cast<double>(net.members.size()) <= net.size_bound()) ++bounded;
    }
  }
  report(6, covered == nets && bounded == nets, "greedy epsilon-net coverage and size",
         std::to_string(covered) + "/" + std::to_string(nets) + " covered, " +
             std::to_string(bounded) + "/" + std::to_string(nets) + " within bound");
}

// ---------------------------------------------------------------------------
// 7. Update cost independent of accuracy: instrumented writes (hard) and
// wall-clock ratios (soft).

void criterion_update_cost() {
  bool ok = true;
  for (u64 k : {u64{4}, u64{200}, u64{5000}, u64{200000}}) {
    const u64 cs_ops = measured_ops_per_update([k] { return CountSketch<>(k, 7); });
    const u64 med_ops = measured_ops_per_update([k] { return MedianTracker<>(k, 11, 7); });
    const u64 ams_ops = measured_ops_per_update(
        [k] { return AmsSketch(k, 7, AmsSketch::SignMode::kIndependent); });
    ok = ok && cs_ops == 1 && med_ops == 11 && ams_ops == k;
  }
  report(7, ok, "counter writes per update: cs=1, median=r, ams=k",
         "k grid {4, 200, 5000, 200000}, r=11");

  // Soft wall-clock corollary; machine-dependent, never gates.
  const double eps_coarse = 0.2, eps_fine = 0.02, delta = 0.25;
  const u64 k_coarse = static_cast<u64>(std::ceil(2.0 / (eps_coarse * eps_coarse * delta)));
  const u64 k_fine = static_cast<u64>(std::ceil(2.0 / (eps_fine * eps_fine * delta)));
  BenchConfig cs_cfg;
  cs_cfg.seed = 70;
  const double cs_coarse = bench_estimator("cs", k_coarse, 1, eps_coarse, cs_cfg, [&] {
                             return CountSketch<>(k_coarse, 71);
                           }).ns_per_update;
  const double cs_fine = bench_estimator("cs", k_fine, 1, eps_fine, cs_cfg, [&] {
                           return CountSketch<>(k_fine, 72);
                         }).ns_per_update;
  const double cs_ratio = cs_fine / cs_coarse;
  report_soft("cs ns/update " + fmt(cs_coarse) + " (eps=0.2) vs " + fmt(cs_fine) +
              " (eps=0.02): ratio " + fmt(cs_ratio) + (cs_ratio < 2.0 ? " < 2" : " NOT < 2"));

  BenchConfig ams_cfg;
  ams_cfg.batch_size = 20000;  // k_fine makes million-update batches impractical here
  ams_cfg.seed = 73;
  const double ams_coarse =
      bench_estimator("ams", k_coarse, 1, eps_coarse, ams_cfg, [&] {
        return AmsSketch(k_coarse, 74, AmsSketch::SignMode::kIndependent);
      }).ns_per_update;
  const double ams_fine = bench_estimator("ams", k_fine, 1, eps_fine, ams_cfg, [&] {
                            return AmsSketch(k_fine, 75, AmsSketch::SignMode::kIndependent);
                          }).ns_per_update;
  const double ams_ratio = ams_fine / ams_coarse;
  report_soft("ams ns/update " + fmt(ams_coarse) + " (eps=0.2) vs " + fmt(ams_fine) +
              " (eps=0.02): ratio " + fmt(ams_ratio) +
              (ams_ratio > 10.0 ? " > 10" : " NOT > 10"));
}

// ---------------------------------------------------------------------------
// 8. CountSketch strong-tracking failure on the block hard instance.

double prefix_failure_fraction(const FailureStats& stats, std::size_t checkpoints,
                               double eps) {
  u64 failing = 0;
  for (const TrackingReport& r : stats.reports) {
    double sup = 0.0;
    for (std::size_t c = 0; c < checkpoints && c < r.trace.size(); ++c)
      sup = std::max(sup, r.trace[c].normalized_error);
    if (sup > eps) ++failing;
  }
  return static_cast<double>(failing) / static_cast<double>(stats.reports.size());
}

void criterion_cs_hard() {
  const double eps = 0.45;
  const u64 k = 40;
  const u64 trials = 500;

  // Primary leg: ell = 4. Threshold 0.10 was calibrated from a pilot at
  // disjoint seeds (observed fraction ~0.28 at T=2000); the analytic floor
  // 0.5*(1-(1-1/(10 k eps^2))^ell) is ~0.024.
  const Stream hard4 = gen_cs_hard(eps, 4);
  const FailureStats stats4 = failure_probability(
      hard4, [k](u64 seed) { return CountSketch<>(k, seed); }, eps, TrackMode::kStrong,
      trials, 8000, EvalPolicy::at_times(hard4.checkpoints), kThreads);
  const double threshold = 0.10;
  const bool primary_ok = stats4.fraction >= threshold;

  // Monotonicity with paired seeds: one ell = 8 run scored at its first 2
  // and all 8 checkpoints (the ell = 2 stream is a prefix). Frequencies
  // reach Delta^8 ~ 6.1e18 > 2^62, hence 128-bit counters.
  const Stream hard8 = gen_cs_hard(eps, 8);
  const FailureStats stats8 = failure_probability(
      hard8, [k](u64 seed) { return CountSketch<i128>(k, seed); }, eps, TrackMode::kStrong,
      trials, 8100, EvalPolicy::at_times(hard8.checkpoints), kThreads, true);
  const double f2 = prefix_failure_fraction(stats8, 2, eps);
  const double f8 = prefix_failure_fraction(stats8, 8, eps);
  const bool mono_ok = f8 >= f2;

  report(8, primary_ok && mono_ok, "block hard instance breaks strong tracking",
         "ell=4 fraction=" + fmt(stats4.fraction) + " >= " + fmt(threshold) +
             "; paired ell=2/8 fractions " + fmt(f2) + " <= " + fmt(f8));
}

// ---------------------------------------------------------------------------
// 9. AMS strong-tracking degradation on the distinct stream.

void criterion_ams_hard() {
  const double eps = 0.1;
  const u64 k = 16;
  const u64 trials = 200;
  const Stream hard = gen_ams_hard(eps, 3);
  const FailureStats stats = failure_probability(
      hard, [k](u64 seed) { return AmsSketch(k, seed, AmsSketch::SignMode::kIndependent); },
      eps, TrackMode::kStrong, trials, 9000, EvalPolicy::at_times(hard.checkpoints),
      kThreads, true);
  const double f1 = prefix_failure_fraction(stats, 1, eps);
  const double f2 = prefix_failure_fraction(stats, 2, eps);
  const double f3 = prefix_failure_fraction(stats, 3, eps);
  // Paired seeds make decreases impossible; demand growth overall and allow
  // at most one flat step.
  const int strict_steps = (f2 > f1 ? 1 : 0) + (f3 > f2 ? 1 : 0);
  const bool ok = f2 >= f1 && f3 >= f2 && f3 > f1 && strict_steps >= 1;
  report(9, ok, "undersized AMS degrades with more checkpoints",
         "fractions " + fmt(f1) + ", " + fmt(f2) + ", " + fmt(f3) + " at ell=1,2,3");
}

// ---------------------------------------------------------------------------
// 10. Exactness and linearity, zero tolerance.

void criterion_exactness_linearity() {
  bool ok = true;
  u64 word = 1010;
  auto next = [&word] { return detail::mix64(word += detail::kGolden); };

  // Collision-free supports estimated exactly.
  for (int rep = 0; rep < 50 && ok; ++rep) {
    const u64 k = 256;
    const u64 support = 1 + next() % 30;
    std::vector<u64> items;
    for (u64 i = 0; i < support; ++i) items.push_back(1 + next() % 100000);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    u64 seed = next();
    for (int tries = 0; tries < 1000; ++tries, ++seed) {
      CountSketch<> probe(k, seed);
      std::vector<bool> used(k, false);
      bool injective = true;
      for (u64 item : items) {
        const u64 b = probe.bucket_hash()(item);
        if (used[b]) {
          injective = false;
          break;
        }
        used[b] = true;
      }
      if (injective) break;
    }
    CountSketch<> sketch(k, seed);
    u128 norm_sq = 0;
    for (u64 item : items) {
      const u64 f = 1 + item % 7;
      sketch.update(item, f);
      norm_sq += static_cast<u128>(f) * f;
    }
    ok = ok && sketch.estimate_sq() == norm_sq;
  }
  const bool exact_ok = ok;

  // Concatenation linearity, bit-exact counters.
  ok = true;
  for (int rep = 0; rep < 20 && ok; ++rep) {
    const Stream a = gen_uniform(1 + next() % 64, 1 + next() % 500, next());
    const Stream b = gen_zipf(1 + next() % 64, 1 + next() % 500, 1.2, next());
    const u64 seed = next();
    CountSketch<> incremental(32, seed);
    CountSketch<> whole(32, seed);
    for (const Run& r : a.runs) incremental.update(r.item, r.count);
    for (const Run& r : b.runs) incremental.update(r.item, r.count);
    for (const Stream* s : {&a, &b})
      for (const Run& r : s->runs) whole.update(r.item, r.count);
    ok = ok && std::equal(incremental.counters().begin(), incremental.counters().end(),
                          whole.counters().begin());
  }
  const bool linear_ok = ok;

  // Oracle incremental norm vs brute force on 1000 random small streams.
  ok = true;
  for (int rep = 0; rep < 1000 && ok; ++rep) {
    const u64 n = 1 + next() % 100;
    const u64 m = 1 + next() % 1000;
    FrequencyOracle oracle;
    std::vector<u64> freq(n + 1, 0);
    for (u64 t = 0; t < m && ok; ++t) {
      const u64 item = 1 + next() % n;
      oracle.update(item);
      ++freq[item];
      u128 brute = 0;
      for (u64 f : freq) brute += static_cast<u128>(f) * f;
      ok = ok && oracle.norm_sq() == brute;
    }
  }
  const bool oracle_ok = ok;

  report(10, exact_ok && linear_ok && oracle_ok, "exactness and linearity",
         std::string("no-collision exact=") + (exact_ok ? "yes" : "no") +
             ", concatenation bit-exact=" + (linear_ok ? "yes" : "no") +
             ", oracle-vs-brute exact=" + (oracle_ok ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion_one_shot();
  criterion_weak_tracking();
  criterion_median_trick();
  criterion_frobenius_monte_carlo();
  criterion_exhaustive_frobenius();
  criterion_epsnet();
  criterion_update_cost();
  criterion_cs_hard();
  criterion_ams_hard();
  criterion_exactness_linearity();

  if (failures_total == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures_total);
  return failures_total == 0 ? 0 : 1;
}

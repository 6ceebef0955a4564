#include "l2track/frobenius.hpp"

#include <cmath>
#include <stdexcept>

#include "l2track/hash.hpp"
#include "l2track/parallel.hpp"

namespace l2track {

double FrobeniusStats::tail_fraction(double theta) const {
  if (f2_samples.empty()) return 0.0;
  const double t2 = theta * theta;
  u64 over = 0;
  for (double f2 : f2_samples)
    if (f2 > t2) ++over;
  return static_cast<double>(over) / static_cast<double>(f2_samples.size());
}

double frobenius_f2(std::span<const double> x, std::span<const u64> assignment, u64 k) {
  if (k < 1) throw std::invalid_argument("frobenius_f2: k must be >= 1");
  if (assignment.size() != x.size())
    throw std::invalid_argument("frobenius_f2: assignment size mismatch");
  std::vector<double> sum_sq(k, 0.0), sum_quad(k, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (assignment[i] >= k) throw std::invalid_argument("frobenius_f2: bucket out of range");
    const double sq = x[i] * x[i];
    sum_sq[assignment[i]] += sq;
    sum_quad[assignment[i]] += sq * sq;
  }
  double f2 = 0.0;
  for (u64 b = 0; b < k; ++b) f2 += sum_sq[b] * sum_sq[b] - sum_quad[b];
  return f2;
}

double frobenius_mean_exact(std::span<const double> x, u64 k) {
  if (k < 1) throw std::invalid_argument("frobenius_mean_exact: k must be >= 1");
  double total_sq = 0.0, total_quad = 0.0;
  for (double v : x) {
    total_sq += v * v;
    total_quad += v * v * v * v;
  }
  return (total_sq * total_sq - total_quad) / static_cast<double>(k);
}

FrobeniusStats frobenius_stat(std::span<const double> x, u64 k, u64 trials, u64 seed,
                              unsigned threads) {
  if (trials < 1) throw std::invalid_argument("frobenius_stat: trials must be >= 1");
  if (k < 1) throw std::invalid_argument("frobenius_stat: k must be >= 1");
  bool any_nonzero = false;
  for (double v : x) any_nonzero |= (v != 0.0);
  if (!any_nonzero) throw std::invalid_argument("frobenius_stat: x must not be the zero vector");

  FrobeniusStats stats;
  stats.f2_samples.assign(trials, 0.0);
  parallel_for(trials, threads, [&](u64 trial) {
    const KWiseHash h = KWiseHash::sample(k, detail::derive_seed(seed, trial));
    std::vector<double> sum_sq(k, 0.0), sum_quad(k, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double sq = x[i] * x[i];
      const u64 b = h(static_cast<u64>(i));
      sum_sq[b] += sq;
      sum_quad[b] += sq * sq;
    }
    double f2 = 0.0;
    for (u64 b = 0; b < k; ++b) f2 += sum_sq[b] * sum_sq[b] - sum_quad[b];
    stats.f2_samples[trial] = f2;
  });

  double total = 0.0;
  for (double f2 : stats.f2_samples) total += f2;
  stats.mean_f2 = total / static_cast<double>(trials);
  return stats;
}

}  // namespace l2track

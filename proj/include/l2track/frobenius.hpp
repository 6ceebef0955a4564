#pragma once

#include <span>
#include <vector>

#include "l2track/detail/common.hpp"

namespace l2track {

/// Monte Carlo samples of ||B~||_F^2, the squared Frobenius norm of the
/// zero-diagonal collision matrix of a CountSketch bucket assignment applied
/// to x: sum over colliding pairs i != i' of x_i^2 x_{i'}^2.
struct FrobeniusStats {
  double mean_f2 = 0.0;
  std::vector<double> f2_samples;

  /// Fraction of trials with ||B~||_F > theta.
  double tail_fraction(double theta) const;
};

/// ||B~||_F^2 for one explicit bucket assignment, via the bucket-grouped
/// identity sum_b [ (sum_{i in b} x_i^2)^2 - sum_{i in b} x_i^4 ], which
/// avoids forming the n x n matrix.
double frobenius_f2(std::span<const double> x, std::span<const u64> assignment, u64 k);

/// Exact expectation over assignments: (1/k) * sum_{i != i'} x_i^2 x_{i'}^2.
double frobenius_mean_exact(std::span<const double> x, u64 k);

/// Samples `trials` independent bucket hashes (the sketch's h; signs do not
/// affect ||B~||_F) and evaluates ||B~||_F^2 on x for each. Coordinate i of
/// x is hashed as item id i.
FrobeniusStats frobenius_stat(std::span<const double> x, u64 k, u64 trials, u64 seed,
                              unsigned threads = 1);

}  // namespace l2track

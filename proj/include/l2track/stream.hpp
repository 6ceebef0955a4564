#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l2track/detail/common.hpp"

namespace l2track {

/// `count` consecutive occurrences of `item`.
struct Run {
  u64 item;
  u64 count;
  friend bool operator==(const Run&, const Run&) = default;
};

/// A materialized insertion-only stream, run-length encoded. Hard-instance
/// generators attach the prefix lengths at which their analysis evaluates
/// the estimate (`checkpoints`).
struct Stream {
  std::vector<Run> runs;
  u64 length = 0;
  std::vector<u64> checkpoints;

  void append(u64 item, u64 count = 1);
};

/// True when both streams expand to the same item sequence (run boundaries
/// are irrelevant).
bool same_items(const Stream& a, const Stream& b);

/// Items 1, 2, ..., m: the all-distinct stream, whose prefix norm is
/// ||f^(t)||_2^2 = t.
Stream gen_distinct(u64 m);

/// Geometric checkpoint times t_j = sum_{i<=j} ceil(10/eps)^i for the
/// distinct-stream experiment. Requires 0 < eps <= 0.1; throws when a time
/// would overflow 64 bits.
std::vector<u64> ams_checkpoints(double eps, u64 ell);

/// Distinct stream of length t_ell with ams_checkpoints attached.
Stream gen_ams_hard(double eps, u64 ell);

/// Block stream with Delta = ceil(100/eps), w = ceil(1/eps): block j brings w
/// fresh items, each repeated Delta^j times, so the frequency vector at the
/// j-th checkpoint holds w copies of each of Delta, Delta^2, ..., Delta^j.
/// Checkpoints are the cumulative lengths sum_{j'<=j} w*Delta^j'.
/// Requires 0 < eps <= 0.5.
Stream gen_cs_hard(double eps, u64 ell);

/// i.i.d. uniform items over [1, n].
Stream gen_uniform(u64 n, u64 m, u64 seed);

/// i.i.d. Zipf(alpha) items over [1, n], p_i proportional to i^-alpha,
/// sampled by inverse CDF with the table accumulated in extended precision.
Stream gen_zipf(u64 n, u64 m, double alpha, u64 seed);

/// Reads the one-decimal-id-per-line format; '#' lines are comments.
/// Malformed lines raise a parse error carrying the line number; ids must be
/// below 2^61 - 1. Adjacent equal items are merged into runs.
Stream read_stream(std::istream& in);
Stream read_stream_file(const std::string& path);

/// Writes one id per line (runs expanded), trailing newline included.
void write_stream(const Stream& s, std::ostream& out);
void write_stream_file(const Stream& s, const std::string& path);

/// Largest ell with t_ell <= m for the geometric checkpoint sequence.
u64 ams_ell_for_length(double eps, u64 m);

/// Declarative stream description; build() materializes it.
struct StreamSpec {
  enum class Family { kDistinct, kUniform, kZipf, kAmsHard, kCsHardBlocks, kFile };

  Family family = Family::kDistinct;
  u64 m = 0;
  u64 n = 0;
  double alpha = 1.0;
  double eps = 0.1;
  u64 ell = 1;
  std::string path;
  u64 seed = 0;

  Stream build() const;
};

}  // namespace l2track

#pragma once

#include <utility>
#include <vector>

#include "l2track/detail/common.hpp"
#include "l2track/stream.hpp"

namespace l2track {

/// A prefix frequency vector kept by the net: its time index, sparse
/// contents, and squared norm.
struct NetMember {
  u64 time = 0;
  std::vector<std::pair<u64, u64>> snapshot;  // sorted by item
  u128 norm_sq = 0;
};

/// Greedy l2 epsilon-net over the prefixes of an insertion-only stream.
/// Every member is itself a prefix. Members are pairwise more than eps
/// apart, and consecutive prefix increments have non-negative inner
/// products, so the squared gaps telescope:
///   (|members| - 1) * eps^2 < ||f^(m)||_2^2,
/// giving the size bound 1 + eps^-2 * ||f^(m)||_2^2.
struct EpsNet {
  double eps = 0.0;  // absolute l2 radius
  std::vector<NetMember> members;
  double final_norm = 0.0;  // ||f^(m)||_2

  double size_bound() const { return 1.0 + (final_norm * final_norm) / (eps * eps); }
};

/// Scans prefixes in time order and keeps f^(t) when no current member is
/// within eps of it; f^(1) always enters (the empty net covers nothing).
EpsNet greedy_net(const Stream& s, double eps);

/// Radius given relative to the final norm: eps = eps_rel * ||f^(m)||_2.
EpsNet greedy_net_relative(const Stream& s, double eps_rel);

struct NetCheck {
  bool covered = false;
  double max_min_distance = 0.0;
};

/// Recomputes every prefix and its minimum distance to the net; covered
/// means the maximum of those minima is at most net.eps.
NetCheck verify_net(const Stream& s, const EpsNet& net);

}  // namespace l2track

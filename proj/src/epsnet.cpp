#include "l2track/epsnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace l2track {

namespace {

using FreqMap = std::unordered_map<u64, u64>;

std::vector<std::pair<u64, u64>> sorted_snapshot(const FreqMap& f) {
  std::vector<std::pair<u64, u64>> snap(f.begin(), f.end());
  std::sort(snap.begin(), snap.end());
  return snap;
}

// ||f - y||^2 = ||f||^2 + ||y||^2 - 2<f,y>; <f,y> only needs y's support
// because y is a prefix of f (but the formula is general).
u128 distance_sq(const FreqMap& f, u128 f_norm_sq, const NetMember& y) {
  u128 dot = 0;
  for (const auto& [item, count] : y.snapshot) {
    const auto it = f.find(item);
    if (it != f.end()) dot += static_cast<u128>(it->second) * count;
  }
  return f_norm_sq + y.norm_sq - 2 * dot;
}

}  // namespace

EpsNet greedy_net(const Stream& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("greedy_net: eps must be positive");
  if (s.length == 0) throw std::invalid_argument("greedy_net: empty stream");

  EpsNet net;
  net.eps = eps;
  const double eps_sq = eps * eps;

  FreqMap f;
  u128 f_norm_sq = 0;
  FreqMap last;      // most recent member's contents
  i128 last_d2 = 0;  // ||f - last||^2, maintained incrementally
  u64 t = 0;

  auto add_member = [&] {
    net.members.push_back({t, sorted_snapshot(f), f_norm_sq});
    last = f;
    last_d2 = 0;
  };

  for (const Run& r : s.runs) {
    for (u64 c = 0; c < r.count; ++c) {
      ++t;
      u64& fi = f[r.item];
      f_norm_sq += 2 * static_cast<u128>(fi) + 1;
      if (!net.members.empty()) {
        const auto it = last.find(r.item);
        const i128 diff = static_cast<i128>(fi) - static_cast<i128>(it == last.end() ? 0 : it->second);
        last_d2 += 2 * diff + 1;
      }
      ++fi;

      if (net.members.empty()) {
        add_member();
        continue;
      }
      if (detail::to_double(static_cast<u128>(last_d2)) <= eps_sq) continue;

      // The nearest member of an insertion-only prefix is always the most
      // recent one (coordinates only grow), but membership never relies on
      // that: scan everything, newest first.
      bool within = false;
      for (auto it2 = net.members.rbegin(); it2 != net.members.rend(); ++it2) {
        if (detail::to_double(distance_sq(f, f_norm_sq, *it2)) <= eps_sq) {
          within = true;
          break;
        }
      }
      if (!within) add_member();
    }
  }

  net.final_norm = std::sqrt(detail::to_double(f_norm_sq));
  return net;
}

EpsNet greedy_net_relative(const Stream& s, double eps_rel) {
  if (!(eps_rel > 0.0)) throw std::invalid_argument("greedy_net_relative: eps must be positive");
  u128 norm_sq = 0;
  {
    FreqMap f;
    for (const Run& r : s.runs) {
      u64& fi = f[r.item];
      norm_sq += 2 * static_cast<u128>(fi) * r.count + static_cast<u128>(r.count) * r.count;
      fi += r.count;
    }
  }
  const double eps = eps_rel * std::sqrt(detail::to_double(norm_sq));
  if (!(eps > 0.0)) throw std::invalid_argument("greedy_net_relative: empty stream");
  return greedy_net(s, eps);
}

NetCheck verify_net(const Stream& s, const EpsNet& net) {
  NetCheck check;
  if (net.members.empty()) return check;  // nothing covers a non-empty stream

  FreqMap f;
  u128 f_norm_sq = 0;
  u128 max_min_d2 = 0;
  bool any = false;

  for (const Run& r : s.runs) {
    for (u64 c = 0; c < r.count; ++c) {
      u64& fi = f[r.item];
      f_norm_sq += 2 * static_cast<u128>(fi) + 1;
      ++fi;
      u128 min_d2 = ~u128{0};
      for (const NetMember& y : net.members)
        min_d2 = std::min(min_d2, distance_sq(f, f_norm_sq, y));
      max_min_d2 = std::max(max_min_d2, min_d2);
      any = true;
    }
  }

  check.max_min_distance = std::sqrt(detail::to_double(max_min_d2));
  check.covered = any && detail::to_double(max_min_d2) <= net.eps * net.eps;
  return check;
}

}  // namespace l2track

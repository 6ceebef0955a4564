#pragma once

#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "l2track/detail/common.hpp"

namespace l2track {

/// Exact ground truth: per-item counts plus ||f||_2^2 maintained in constant
/// time per update via (f+a)^2 - f^2 = 2fa + a^2.
class FrequencyOracle {
 public:
  void update(u64 item) { update(item, 1); }

  void update(u64 item, u64 count) {
    if (count == 0) return;
    if (count > std::numeric_limits<u64>::max() - length_)
      throw std::overflow_error("FrequencyOracle: stream length overflows 64 bits");
    u64& f = freqs_[item];
    norm_sq_ += 2 * static_cast<u128>(f) * count + static_cast<u128>(count) * count;
    f += count;
    length_ += count;
  }

  u64 frequency(u64 item) const {
    auto it = freqs_.find(item);
    return it == freqs_.end() ? 0 : it->second;
  }

  /// Exact ||f||_2^2.
  u128 norm_sq() const { return norm_sq_; }

  /// ||f||_2^2 as double; lets the oracle stand in as an exact estimator.
  double estimate() const { return detail::to_double(norm_sq_); }

  u64 length() const { return length_; }
  u64 support_size() const { return freqs_.size(); }
  const std::unordered_map<u64, u64>& frequencies() const { return freqs_; }

 private:
  std::unordered_map<u64, u64> freqs_;
  u128 norm_sq_ = 0;
  u64 length_ = 0;
};

}  // namespace l2track

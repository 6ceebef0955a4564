#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "l2track/detail/common.hpp"

namespace l2track {

/// Degree-7 polynomial hash over GF(2^61 - 1), an 8-wise independent family.
///
/// h(x) = ((sum_d coeffs[d] * x^d) mod p) mod range, p = 2^61 - 1.
/// The Mersenne modulus makes reduction shift-and-add; the final `mod range`
/// adds bias at most range/p <= 2^32 / 2^61 ~ 5e-10.
class KWiseHash {
 public:
  static constexpr int kDegree = 8;
  static constexpr u64 kPrime = (u64{1} << 61) - 1;
  static constexpr u64 kMaxRange = u64{1} << 32;

  using Coeffs = std::array<u64, kDegree>;

  /// Explicit coefficients, mainly for fixtures; each must lie in [0, p).
  KWiseHash(const Coeffs& coeffs, u64 range) : coeffs_(coeffs), range_(range) {
    if (range_ < 1 || range_ > kMaxRange)
      throw std::invalid_argument("KWiseHash: range must be in [1, 2^32]");
    for (u64 c : coeffs_)
      if (c >= kPrime)
        throw std::invalid_argument("KWiseHash: coefficient out of field");
  }

  /// Draws the 8 coefficients from a generator keyed by `seed`; the same
  /// seed always yields the same hash. Coefficients are made uniform over
  /// [0, p) by rejecting 64-bit words >= p.
  static KWiseHash sample(u64 range, u64 seed) {
    if (range < 1 || range > kMaxRange)
      throw std::invalid_argument("KWiseHash: range must be in [1, 2^32]");
    std::mt19937_64 gen(seed);
    Coeffs coeffs{};
    for (auto& c : coeffs) {
      u64 w;
      do {
        w = gen();
      } while (w >= kPrime);
      c = w;
    }
    return KWiseHash(coeffs, range);
  }

  /// Bucket value in [0, range). Requires x < p.
  u64 operator()(u64 x) const {
    if (x >= kPrime) throw std::invalid_argument("KWiseHash: input outside field");
    // Horner evaluation, highest degree first.
    u64 acc = coeffs_[kDegree - 1];
    for (int d = kDegree - 2; d >= 0; --d) acc = add_mod(mul_mod(acc, x), coeffs_[d]);
    return acc % range_;
  }

  /// Rademacher value: +1 when the bucket is 1, -1 when it is 0.
  /// Only meaningful for range-2 hashes.
  int sign(u64 x) const {
    if (range_ != 2) throw std::invalid_argument("KWiseHash: sign requires range 2");
    return (*this)(x) == 1 ? +1 : -1;
  }

  u64 range() const { return range_; }
  const Coeffs& coefficients() const { return coeffs_; }

 private:
  static u64 mul_mod(u64 a, u64 b) {
    u128 z = static_cast<u128>(a) * b;
    u64 folded = static_cast<u64>(z & kPrime) + static_cast<u64>(z >> 61);
    folded = (folded & kPrime) + (folded >> 61);
    return folded >= kPrime ? folded - kPrime : folded;
  }

  static u64 add_mod(u64 a, u64 b) {
    u64 s = a + b;  // a, b < 2^61, no wraparound
    return s >= kPrime ? s - kPrime : s;
  }

  Coeffs coeffs_;
  u64 range_;
};

}  // namespace l2track

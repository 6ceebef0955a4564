#pragma once

#include <cstdint>

namespace l2track {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seed derivation
// and as a stateless per-(key,index) pseudorandom function.
constexpr u64 kGolden = 0x9e3779b97f4a7c15ULL;

inline u64 mix64(u64 z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for lane `lane` of a base seed.
inline u64 derive_seed(u64 base, u64 lane) {
  return mix64(base + kGolden * (lane + 1));
}

inline double to_double(u128 v) {
  // Exact up to 2^64; beyond that the usual double rounding applies.
  return static_cast<double>(static_cast<u64>(v >> 64)) * 18446744073709551616.0 +
         static_cast<double>(static_cast<u64>(v));
}

}  // namespace detail
}  // namespace l2track

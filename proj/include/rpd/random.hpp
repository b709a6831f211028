#pragma once

#include <cstdint>
#include <random>

namespace rpd {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from (base, index, side). Distinct
/// tuples map to distinct, well-mixed seeds, so replicate r of side s never
/// shares a stream with any other replicate.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                                    std::uint64_t side = 0) noexcept {
  return mix64(mix64(mix64(base) ^ index) ^ (side + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
  return Engine(mix64(seed));
}

}  // namespace rpd

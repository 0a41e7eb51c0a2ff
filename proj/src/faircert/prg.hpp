#pragma once

#include <cstdint>
#include <string_view>

namespace faircert {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + kGolden));
}

/// Named subsystem seed: the same (seed, name) always gives the same value.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return combine(seed, h);
}

/// Counter-mode generator: block i is mix64(key + (i+1)*golden). Position-addressable,
/// so any draw can be recomputed from (key, counter) alone.
class CounterPrg {
 public:
  constexpr CounterPrg(std::uint64_t key, std::uint64_t stream = 0) noexcept
      : key_(combine(key, stream)) {}

  constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform in (0, 1], 53 bits.
  double uniform_open0() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }
  /// Uniform in [0, 1), 53 bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound) by multiply-high; bias is below 2^-32 for bounds under 2^32.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// True with probability micro_units / 10^6, decided exactly on the 64-bit draw.
  bool bernoulli_micro(std::uint32_t micro_units) noexcept {
    const unsigned __int128 draw = static_cast<unsigned __int128>(next_u64()) * 1'000'000u;
    return draw < (static_cast<unsigned __int128>(micro_units) << 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace faircert

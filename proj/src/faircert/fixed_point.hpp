#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace faircert {

/// Signed Q16.16 fixed point with saturating arithmetic.
class Q16 {
 public:
  static constexpr int kFracBits = 16;
  static constexpr std::int64_t kOne = std::int64_t{1} << kFracBits;

  constexpr Q16() = default;

  static constexpr Q16 from_raw(std::int32_t raw) noexcept {
    Q16 q;
    q.raw_ = raw;
    return q;
  }
  static constexpr Q16 from_int(std::int32_t value) noexcept { return saturate(std::int64_t{value} * kOne); }
  static Q16 from_double(double value) noexcept {
    if (std::isnan(value)) return Q16{};
    const double scaled = std::nearbyint(value * static_cast<double>(kOne));
    if (scaled >= static_cast<double>(std::numeric_limits<std::int32_t>::max())) return max();
    if (scaled <= static_cast<double>(std::numeric_limits<std::int32_t>::min())) return min();
    return from_raw(static_cast<std::int32_t>(scaled));
  }

  static constexpr Q16 max() noexcept { return from_raw(std::numeric_limits<std::int32_t>::max()); }
  static constexpr Q16 min() noexcept { return from_raw(std::numeric_limits<std::int32_t>::min()); }

  static constexpr Q16 saturate(std::int64_t raw) noexcept {
    if (raw > std::numeric_limits<std::int32_t>::max()) return max();
    if (raw < std::numeric_limits<std::int32_t>::min()) return min();
    return from_raw(static_cast<std::int32_t>(raw));
  }

  constexpr std::int32_t raw() const noexcept { return raw_; }
  constexpr double to_double() const noexcept { return static_cast<double>(raw_) / static_cast<double>(kOne); }

  friend constexpr Q16 operator+(Q16 a, Q16 b) noexcept { return saturate(std::int64_t{a.raw_} + b.raw_); }
  friend constexpr Q16 operator-(Q16 a, Q16 b) noexcept { return saturate(std::int64_t{a.raw_} - b.raw_); }
  friend constexpr Q16 operator*(Q16 a, Q16 b) noexcept {
    // arithmetic shift floors toward -inf
    return saturate((std::int64_t{a.raw_} * b.raw_) >> kFracBits);
  }
  constexpr Q16 operator-() const noexcept { return saturate(-std::int64_t{raw_}); }

  friend constexpr bool operator==(Q16, Q16) = default;
  friend constexpr auto operator<=>(Q16, Q16) = default;

 private:
  std::int32_t raw_ = 0;
};

}  // namespace faircert

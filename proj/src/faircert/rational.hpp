#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace faircert {

using int128 = __int128;

/// Exact rational with a positive denominator, always in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Normalizes a 128-bit fraction; throws overflow if it does not fit in 64 bits.
  static Rational from_wide(int128 num, int128 den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }
  long double to_long_double() const noexcept {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const int128 lhs = static_cast<int128>(a.num_) * b.den_;
    const int128 rhs = static_cast<int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline constexpr std::uint32_t kMicroScale = 1'000'000;

/// A nonnegative decimal with micro-unit resolution: value = units / 10^6.
struct Micro {
  std::uint32_t units = 0;

  static Micro parse(std::string_view text);
  static Micro from_double(double value);

  Rational to_rational() const { return Rational(units, kMicroScale); }
  double to_double() const noexcept { return static_cast<double>(units) / kMicroScale; }
  std::string to_string() const;

  bool in_open_unit_interval() const noexcept { return units > 0 && units < kMicroScale; }
  bool in_closed_unit_interval() const noexcept { return units <= kMicroScale; }

  friend auto operator<=>(const Micro&, const Micro&) = default;
};

}  // namespace faircert

#include "faircert/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "faircert/bytes.hpp"
#include "faircert/error.hpp"

namespace faircert {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::length_mismatch: return "LENGTH_MISMATCH";
    case ErrorCode::id_out_of_range: return "ID_OUT_OF_RANGE";
    case ErrorCode::empty_cell: return "EMPTY_CELL";
    case ErrorCode::gap_not_below_threshold: return "GAP_NOT_BELOW_THRESHOLD";
    case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::invalid_weights: return "INVALID_WEIGHTS";
    case ErrorCode::empty_input: return "EMPTY_INPUT";
    case ErrorCode::malformed_key: return "MALFORMED_KEY";
    case ErrorCode::malformed_model: return "MALFORMED_MODEL";
    case ErrorCode::wrong_state: return "WRONG_STATE";
    case ErrorCode::circuit_mismatch: return "CIRCUIT_MISMATCH";
    case ErrorCode::size_mismatch: return "SIZE_MISMATCH";
    case ErrorCode::precheck_failed: return "PRECHECK_FAILED";
    case ErrorCode::fsc_abort: return "FSC_ABORT";
    case ErrorCode::not_fair: return "NOT_FAIR";
    case ErrorCode::sig_invalid: return "SIG_INVALID";
    case ErrorCode::spec_mismatch: return "SPEC_MISMATCH";
    case ErrorCode::protocol_error: return "PROTOCOL_ERROR";
    case ErrorCode::io_error: return "IO_ERROR";
    case ErrorCode::overflow: return "OVERFLOW";
  }
  return "UNKNOWN";
}

namespace {

int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_wide(num, den);
}

Rational Rational::from_wide(int128 num, int128 den) {
  require(den != 0, ErrorCode::invalid_argument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr int128 lo = std::numeric_limits<std::int64_t>::min();
  constexpr int128 hi = std::numeric_limits<std::int64_t>::max();
  require(num > lo && num <= hi && den <= hi, ErrorCode::overflow, "rational out of 64-bit range");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<int128>(a.num_) * b.den_ + static_cast<int128>(b.num_) * a.den_,
                             static_cast<int128>(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<int128>(a.num_) * b.den_ - static_cast<int128>(b.num_) * a.den_,
                             static_cast<int128>(a.den_) * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<int128>(a.num_) * b.num_, static_cast<int128>(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<int128>(a.num_) * b.den_, static_cast<int128>(a.den_) * b.num_);
}

Micro Micro::parse(std::string_view text) {
  // Accepts "0.05", ".5", "1", "0.000001"; at most six fractional digits.
  const auto bad = [&] { fail(ErrorCode::invalid_argument, "not a micro-unit decimal: '" + std::string(text) + "'"); };
  if (text.empty()) bad();
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) bad();
  if (frac.size() > 6) bad();
  std::uint64_t units = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') bad();
    units = units * 10 + static_cast<std::uint64_t>(c - '0');
    if (units > 4294) bad();
  }
  units *= kMicroScale;
  std::uint64_t scale = 100000;
  for (char c : frac) {
    if (c < '0' || c > '9') bad();
    units += static_cast<std::uint64_t>(c - '0') * scale;
    scale /= 10;
  }
  if (units > std::numeric_limits<std::uint32_t>::max()) bad();
  return Micro{static_cast<std::uint32_t>(units)};
}

Micro Micro::from_double(double value) {
  require(std::isfinite(value) && value >= 0.0 && value * kMicroScale <= 4294967295.0,
          ErrorCode::invalid_argument, "value out of micro-unit range");
  return Micro{static_cast<std::uint32_t>(std::llround(value * kMicroScale))};
}

std::string Micro::to_string() const {
  std::string out = std::to_string(units / kMicroScale);
  std::uint32_t frac = units % kMicroScale;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, 6 - digits.size(), '0');
  while (digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  require(hex.size() % 2 == 0, ErrorCode::invalid_argument, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto [ptr, ec] = std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, out[i], 16);
    require(ec == std::errc{} && ptr == hex.data() + 2 * i + 2, ErrorCode::invalid_argument, "bad hex digit");
  }
  return out;
}

}  // namespace faircert

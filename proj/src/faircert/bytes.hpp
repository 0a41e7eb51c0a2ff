#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faircert/error.hpp"

namespace faircert {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Little-endian encoder.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  ByteWriter& u16(std::uint16_t v) { return le(v, 2); }
  ByteWriter& u32(std::uint32_t v) { return le(v, 4); }
  ByteWriter& u64(std::uint64_t v) { return le(v, 8); }
  ByteWriter& i32(std::int32_t v) { return le(static_cast<std::uint32_t>(v), 4); }
  ByteWriter& bytes(ByteView v) {
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
  }
  ByteWriter& text(std::string_view s) {
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
  }

  const Bytes& view() const noexcept { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  ByteWriter& le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
  }
  Bytes out_;
};

/// Little-endian decoder; truncated input raises `code`.
class ByteReader {
 public:
  explicit ByteReader(ByteView data, ErrorCode code = ErrorCode::protocol_error) : data_(data), code_(code) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(le(4))); }
  ByteView bytes(std::size_t n) {
    need(n);
    ByteView v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
  }
  std::string text(std::size_t n) {
    ByteView v = bytes(n);
    return std::string(v.begin(), v.end());
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return remaining() == 0; }
  void expect_done(const char* what) const {
    require(done(), code_, std::string("trailing bytes after ") + what);
  }

 private:
  void need(std::size_t n) const { require(remaining() >= n, code_, "truncated input"); }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  ByteView data_;
  std::size_t pos_ = 0;
  ErrorCode code_;
};

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

}  // namespace faircert

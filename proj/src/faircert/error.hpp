#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace faircert {

enum class ErrorCode : std::uint8_t {
  invalid_argument = 1,
  length_mismatch,
  id_out_of_range,
  empty_cell,
  gap_not_below_threshold,
  dimension_mismatch,
  invalid_weights,
  empty_input,
  malformed_key,
  malformed_model,
  wrong_state,
  circuit_mismatch,
  size_mismatch,
  precheck_failed,
  fsc_abort,
  not_fair,
  sig_invalid,
  spec_mismatch,
  protocol_error,
  io_error,
  overflow,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace faircert

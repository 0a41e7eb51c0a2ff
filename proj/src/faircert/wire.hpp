#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "faircert/augmentor.hpp"
#include "faircert/bytes.hpp"
#include "faircert/crypto.hpp"
#include "faircert/fairness.hpp"
#include "faircert/secure_compute.hpp"

namespace faircert {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameLength = 1u << 28;

enum class FrameType : std::uint8_t {
  hello = 0x01,
  cert_id = 0x02,
  cert_request = 0x03,
  fsc_input = 0x04,
  fsc_result = 0x05,
  certificate = 0x06,
  seed_reveal = 0x07,
  infer_request = 0x08,
  infer_result = 0x09,
  reject = 0x0A,
  abort = 0x0B,
};

std::string frame_type_name(FrameType type);

/// length u32 LE (payload size + 1) | type u8 | payload
struct Frame {
  FrameType type = FrameType::abort;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode_frame(const Frame& frame);
/// Decodes one complete frame; unknown type or bad length is a PROTOCOL_ERROR.
Frame decode_frame(ByteView bytes);
FrameType checked_frame_type(std::uint8_t raw);

enum class Role : std::uint8_t { regulator = 1, server = 2, client = 3, dealer = 4 };
std::string role_name(Role role);

struct Hello {
  Role role = Role::regulator;
  std::uint16_t version = kProtocolVersion;
};

struct CertRequest {
  FairnessSpec spec;
  std::uint32_t total_m = 0;
  std::optional<AugmentorConfig> augmentor;  // master seed withheld until SEED_REVEAL
};

struct FscInput {
  CircuitId circuit = CircuitId::cert;
  Bytes payload;
};

enum class RejectReason : std::uint8_t {
  not_fair = 1,
  sig_invalid = 2,
  spec_mismatch = 3,
  no_certificate = 4,
};
std::string reject_reason_name(RejectReason reason);

Frame hello_frame(const Hello& hello);
Hello parse_hello(const Frame& frame);

Frame cert_id_frame(const PublicKey& vk);
PublicKey parse_cert_id(const Frame& frame);

Frame cert_request_frame(const CertRequest& request);
CertRequest parse_cert_request(const Frame& frame);

Frame fsc_input_frame(const FscInput& input);
FscInput parse_fsc_input(const Frame& frame);

Frame fsc_result_frame(const CertOutput& out);
CertOutput parse_fsc_result(const Frame& frame);

Frame certificate_frame(ByteView certificate_file);

Frame seed_reveal_frame(std::uint64_t seed);
std::uint64_t parse_seed_reveal(const Frame& frame);

Frame infer_request_frame(const FairnessSpec& spec);
FairnessSpec parse_infer_request(const Frame& frame);

Frame infer_result_frame(const InfOutput& out);
InfOutput parse_infer_result(const Frame& frame);

Frame reject_frame(RejectReason reason);
RejectReason parse_reject(const Frame& frame);

Frame abort_frame();

/// Binary form of a TestReport:
/// metric u8 | mode u8 | efg i64/i64 | threshold i64/i64 | required u64 | n u32 | counts u64×n | passed u8 | reason u8 (0 = none)
Bytes encode_report(const TestReport& report);
TestReport decode_report(ByteView bytes);

}  // namespace faircert

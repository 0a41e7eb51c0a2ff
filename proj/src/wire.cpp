#include "faircert/wire.hpp"

namespace faircert {

std::string frame_type_name(FrameType type) {
  switch (type) {
    case FrameType::hello: return "HELLO";
    case FrameType::cert_id: return "CERT_ID";
    case FrameType::cert_request: return "CERT_REQUEST";
    case FrameType::fsc_input: return "FSC_INPUT";
    case FrameType::fsc_result: return "FSC_RESULT";
    case FrameType::certificate: return "CERTIFICATE";
    case FrameType::seed_reveal: return "SEED_REVEAL";
    case FrameType::infer_request: return "INFER_REQUEST";
    case FrameType::infer_result: return "INFER_RESULT";
    case FrameType::reject: return "REJECT";
    case FrameType::abort: return "ABORT";
  }
  return "UNKNOWN";
}

FrameType checked_frame_type(std::uint8_t raw) {
  require(raw >= 0x01 && raw <= 0x0B, ErrorCode::protocol_error, "unknown frame type " + std::to_string(raw));
  return static_cast<FrameType>(raw);
}

Bytes encode_frame(const Frame& frame) {
  require(frame.payload.size() < kMaxFrameLength, ErrorCode::protocol_error, "frame too large");
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(frame.payload.size() + 1)).u8(static_cast<std::uint8_t>(frame.type)).bytes(frame.payload);
  return std::move(w).take();
}

Frame decode_frame(ByteView bytes) {
  ByteReader r(bytes);
  const std::uint32_t length = r.u32();
  require(length >= 1 && length <= kMaxFrameLength, ErrorCode::protocol_error, "bad frame length");
  require(r.remaining() == length, ErrorCode::protocol_error, "frame length does not match payload");
  Frame f;
  f.type = checked_frame_type(r.u8());
  const ByteView payload = r.bytes(length - 1);
  f.payload.assign(payload.begin(), payload.end());
  return f;
}

std::string role_name(Role role) {
  switch (role) {
    case Role::regulator: return "regulator";
    case Role::server: return "server";
    case Role::client: return "client";
    case Role::dealer: return "dealer";
  }
  return "unknown";
}

std::string reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::not_fair: return "NOT_FAIR";
    case RejectReason::sig_invalid: return "SIG_INVALID";
    case RejectReason::spec_mismatch: return "SPEC_MISMATCH";
    case RejectReason::no_certificate: return "NO_CERTIFICATE";
  }
  return "UNKNOWN";
}

namespace {

ByteReader open(const Frame& frame, FrameType expected) {
  require(frame.type == expected, ErrorCode::protocol_error,
          "expected " + frame_type_name(expected) + ", got " + frame_type_name(frame.type));
  return ByteReader(frame.payload);
}

Frame make(FrameType type, ByteWriter&& w) { return Frame{type, std::move(w).take()}; }

}  // namespace

Frame hello_frame(const Hello& hello) {
  return make(FrameType::hello, std::move(ByteWriter().u8(static_cast<std::uint8_t>(hello.role)).u16(hello.version)));
}

Hello parse_hello(const Frame& frame) {
  ByteReader r = open(frame, FrameType::hello);
  Hello h;
  const std::uint8_t role = r.u8();
  require(role >= 1 && role <= 4, ErrorCode::protocol_error, "unknown role id");
  h.role = static_cast<Role>(role);
  h.version = r.u16();
  r.expect_done("HELLO");
  return h;
}

Frame cert_id_frame(const PublicKey& vk) { return make(FrameType::cert_id, std::move(ByteWriter().bytes(vk))); }

PublicKey parse_cert_id(const Frame& frame) {
  ByteReader r = open(frame, FrameType::cert_id);
  PublicKey vk{};
  const ByteView v = r.bytes(32);
  std::copy(v.begin(), v.end(), vk.begin());
  r.expect_done("CERT_ID");
  return vk;
}

Frame cert_request_frame(const CertRequest& req) {
  ByteWriter w;
  w.bytes(encode_spec(req.spec)).u32(req.total_m).u8(static_cast<std::uint8_t>(req.spec.mode()));
  if (req.spec.mode() == TestMode::augmented) {
    require(req.augmentor.has_value(), ErrorCode::invalid_argument, "augmented request without augmentor");
    w.bytes(encode_augmentor(*req.augmentor, false));
  }
  return make(FrameType::cert_request, std::move(w));
}

CertRequest parse_cert_request(const Frame& frame) {
  ByteReader r = open(frame, FrameType::cert_request);
  CertRequest req;
  req.spec = decode_spec(r);
  req.total_m = r.u32();
  const std::uint8_t mode = r.u8();
  require(mode == static_cast<std::uint8_t>(req.spec.mode()), ErrorCode::protocol_error, "mode byte disagrees with spec");
  if (mode == static_cast<std::uint8_t>(TestMode::augmented)) req.augmentor = decode_augmentor(r, false);
  r.expect_done("CERT_REQUEST");
  return req;
}

Frame fsc_input_frame(const FscInput& input) {
  return make(FrameType::fsc_input, std::move(ByteWriter().u8(static_cast<std::uint8_t>(input.circuit)).bytes(input.payload)));
}

FscInput parse_fsc_input(const Frame& frame) {
  ByteReader r = open(frame, FrameType::fsc_input);
  FscInput in;
  const std::uint8_t id = r.u8();
  require(id == 1 || id == 2, ErrorCode::protocol_error, "unknown circuit id");
  in.circuit = static_cast<CircuitId>(id);
  const ByteView rest = r.bytes(r.remaining());
  in.payload.assign(rest.begin(), rest.end());
  return in;
}

Frame fsc_result_frame(const CertOutput& out) { return Frame{FrameType::fsc_result, encode_cert_output(out)}; }

CertOutput parse_fsc_result(const Frame& frame) {
  open(frame, FrameType::fsc_result);
  return decode_cert_output(frame.payload);
}

Frame certificate_frame(ByteView file) { return Frame{FrameType::certificate, Bytes(file.begin(), file.end())}; }

Frame seed_reveal_frame(std::uint64_t seed) { return make(FrameType::seed_reveal, std::move(ByteWriter().u64(seed))); }

std::uint64_t parse_seed_reveal(const Frame& frame) {
  ByteReader r = open(frame, FrameType::seed_reveal);
  const std::uint64_t seed = r.u64();
  r.expect_done("SEED_REVEAL");
  return seed;
}

Frame infer_request_frame(const FairnessSpec& spec) { return Frame{FrameType::infer_request, encode_spec(spec)}; }

FairnessSpec parse_infer_request(const Frame& frame) {
  ByteReader r = open(frame, FrameType::infer_request);
  FairnessSpec spec = decode_spec(r);
  r.expect_done("INFER_REQUEST");
  return spec;
}

Frame infer_result_frame(const InfOutput& out) { return Frame{FrameType::infer_result, encode_inf_output(out)}; }

InfOutput parse_infer_result(const Frame& frame) {
  open(frame, FrameType::infer_result);
  return decode_inf_output(frame.payload);
}

Frame reject_frame(RejectReason reason) {
  return make(FrameType::reject, std::move(ByteWriter().u8(static_cast<std::uint8_t>(reason))));
}

RejectReason parse_reject(const Frame& frame) {
  ByteReader r = open(frame, FrameType::reject);
  const std::uint8_t reason = r.u8();
  require(reason >= 1 && reason <= 4, ErrorCode::protocol_error, "unknown reject reason");
  r.expect_done("REJECT");
  return static_cast<RejectReason>(reason);
}

Frame abort_frame() { return Frame{FrameType::abort, {}}; }

Bytes encode_report(const TestReport& report) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(report.metric)).u8(static_cast<std::uint8_t>(report.mode));
  w.u64(static_cast<std::uint64_t>(report.efg.num())).u64(static_cast<std::uint64_t>(report.efg.den()));
  w.u64(static_cast<std::uint64_t>(report.threshold.num())).u64(static_cast<std::uint64_t>(report.threshold.den()));
  w.u64(report.per_group_required).u32(static_cast<std::uint32_t>(report.per_group_actual.size()));
  for (std::uint64_t n : report.per_group_actual) w.u64(n);
  w.u8(report.passed ? 1 : 0).u8(report.failure_reason ? static_cast<std::uint8_t>(*report.failure_reason) : 0);
  return std::move(w).take();
}

TestReport decode_report(ByteView bytes) {
  ByteReader r(bytes);
  TestReport report;
  const std::uint8_t metric = r.u8();
  const std::uint8_t mode = r.u8();
  require(metric <= 2 && mode <= 1, ErrorCode::protocol_error, "report header");
  report.metric = static_cast<FairnessMetric>(metric);
  report.mode = static_cast<TestMode>(mode);
  const auto rational = [&] {
    const auto num = static_cast<std::int64_t>(r.u64());
    const auto den = static_cast<std::int64_t>(r.u64());
    require(den > 0, ErrorCode::protocol_error, "report denominator");
    return Rational(num, den);
  };
  report.efg = rational();
  report.threshold = rational();
  report.per_group_required = r.u64();
  const std::uint32_t n = r.u32();
  require(r.remaining() / 8 >= n, ErrorCode::protocol_error, "report counts truncated");
  report.per_group_actual.resize(n);
  for (std::uint64_t& c : report.per_group_actual) c = r.u64();
  const std::uint8_t passed = r.u8();
  const std::uint8_t reason = r.u8();
  require(passed <= 1 && reason <= 2, ErrorCode::protocol_error, "report trailer");
  report.passed = passed == 1;
  if (reason) report.failure_reason = static_cast<FailureReason>(reason);
  r.expect_done("report");
  return report;
}

}  // namespace faircert

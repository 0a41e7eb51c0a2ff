#include "faircert/secure_compute.hpp"

#include <algorithm>
#include <sstream>

namespace faircert {

std::string party_name(Party party) { return party == Party::p1 ? "P1" : "P2"; }

std::string circuit_name(CircuitId circuit) { return circuit == CircuitId::cert ? "CERT" : "INF"; }

std::string state_name(SessionState state) {
  switch (state) {
    case SessionState::awaiting_input: return "AWAITING_INPUT";
    case SessionState::ready: return "READY";
    case SessionState::computed: return "COMPUTED";
    case SessionState::delivered: return "DELIVERED";
    case SessionState::aborted: return "ABORTED";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// F_SC session

FscSession::FscSession(std::shared_ptr<const Functionality> backend) : backend_(std::move(backend)) {
  require(backend_ != nullptr, ErrorCode::invalid_argument, "null backend");
}

void FscSession::record(Party party, std::string kind, ByteView payload) {
  transcript_.push_back(TranscriptLine{seq_++, party, std::move(kind), payload.size(), sha3_256(payload)});
}

void FscSession::input(Party party, Bytes payload) {
  require(state_ == SessionState::awaiting_input, ErrorCode::wrong_state,
          "input in state " + state_name(state_));
  auto& slot_ref = inputs_[slot(party)];
  require(!slot_ref, ErrorCode::wrong_state, party_name(party) + " already gave input");
  record(party, "Input", payload);
  slot_ref = std::move(payload);
  if (inputs_[0] && inputs_[1]) state_ = SessionState::ready;
}

void FscSession::compute(Party party, CircuitId circuit) {
  require(state_ == SessionState::ready, ErrorCode::wrong_state, "compute in state " + state_name(state_));
  require(!requested_[slot(party)], ErrorCode::wrong_state, party_name(party) + " already requested compute");
  const std::uint8_t id = static_cast<std::uint8_t>(circuit);
  record(party, "Compute:" + circuit_name(circuit), ByteView(&id, 1));
  requested_[slot(party)] = circuit;
  if (!requested_[0] || !requested_[1]) return;

  if (*requested_[0] != *requested_[1]) {
    state_ = SessionState::aborted;
    abort_ = CircuitAbort{ErrorCode::circuit_mismatch, "parties requested different circuits"};
    fail(ErrorCode::circuit_mismatch, circuit_name(*requested_[0]) + " vs " + circuit_name(*requested_[1]));
  }
  circuit_ = circuit;
  CircuitResult result = backend_->evaluate(circuit, *inputs_[0], *inputs_[1]);
  if (auto* abort = std::get_if<CircuitAbort>(&result)) {
    abort_ = std::move(*abort);
    state_ = SessionState::aborted;
    return;
  }
  result_ = std::move(std::get<CircuitOutput>(result));
  state_ = SessionState::computed;
}

PartyOutput FscSession::output(Party party) {
  require(state_ == SessionState::computed || state_ == SessionState::delivered || state_ == SessionState::aborted,
          ErrorCode::wrong_state, "output in state " + state_name(state_));
  require(!delivered_[slot(party)], ErrorCode::wrong_state, party_name(party) + " already received output");
  delivered_[slot(party)] = true;

  if (state_ == SessionState::aborted) {
    record(party, "Abort", {});
    leakage_.push_back(LeakageEntry{party, "abort", 0});
    return PartyOutput{true, {}};
  }
  const bool first = party == Party::p1;
  const Bytes& y = first ? result_->y1 : result_->y2;
  for (const OutputField& f : first ? result_->y1_fields : result_->y2_fields)
    leakage_.push_back(LeakageEntry{party, f.name, f.length});
  record(party, "Output", y);
  if (delivered_[0] && delivered_[1]) state_ = SessionState::delivered;
  return PartyOutput{false, y};
}

std::vector<LeakageEntry> FscSession::deliveries_to(Party party) const {
  std::vector<LeakageEntry> out;
  for (const LeakageEntry& e : leakage_)
    if (e.party == party) out.push_back(e);
  return out;
}

std::string FscSession::audit_text() const {
  std::ostringstream out;
  for (const TranscriptLine& line : transcript_)
    out << line.seq << ' ' << party_name(line.party) << ' ' << line.kind << ' ' << line.length << ' '
        << to_hex(line.payload_digest) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Payload codecs

Bytes encode_test_bundle(const TestBundle& b) {
  const Bytes data = encode_dataset(b.data);
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(data.size())).bytes(data).bytes(encode_spec(b.spec));
  w.u8(b.augmentor ? 1 : 0);
  if (b.augmentor) w.bytes(encode_augmentor(*b.augmentor, true));
  w.u8(b.server_commitment ? 1 : 0);
  if (b.server_commitment) w.bytes(*b.server_commitment);
  return std::move(w).take();
}

TestBundle decode_test_bundle(ByteView bytes) {
  ByteReader r(bytes, ErrorCode::size_mismatch);
  TestBundle b;
  b.data = decode_dataset(r.bytes(r.u32()));
  b.spec = decode_spec(r);
  if (r.u8()) b.augmentor = decode_augmentor(r, true);
  if (r.u8()) {
    Digest d{};
    const ByteView v = r.bytes(32);
    std::copy(v.begin(), v.end(), d.begin());
    b.server_commitment = d;
  }
  r.expect_done("test bundle");
  return b;
}

Bytes encode_inference_input(const Sample& x) {
  ByteWriter w;
  w.u32(x.group);
  for (Q16 f : x.features) w.i32(f.raw());
  return std::move(w).take();
}

Bytes encode_cert_output(const CertOutput& out) {
  ByteWriter w;
  w.u8(out.fair ? 1 : 0).bytes(out.h.root);
  return std::move(w).take();
}

CertOutput decode_cert_output(ByteView bytes) {
  ByteReader r(bytes);
  CertOutput out;
  const std::uint8_t b = r.u8();
  require(b <= 1, ErrorCode::protocol_error, "certification bit");
  out.fair = b == 1;
  const ByteView h = r.bytes(32);
  std::copy(h.begin(), h.end(), out.h.root.begin());
  r.expect_done("certification output");
  return out;
}

Bytes encode_inf_output(const InfOutput& out) {
  require(out.label <= 0xFFFF, ErrorCode::overflow, "label does not fit u16");
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(out.label)).bytes(out.h.root);
  return std::move(w).take();
}

InfOutput decode_inf_output(ByteView bytes) {
  ByteReader r(bytes);
  InfOutput out;
  out.label = r.u16();
  const ByteView h = r.bytes(32);
  std::copy(h.begin(), h.end(), out.h.root.begin());
  r.expect_done("inference output");
  return out;
}

// ---------------------------------------------------------------------------
// Division-free fairness test

namespace {

struct Family {
  std::vector<std::uint64_t> hits;    // err or pred counts
  std::vector<std::uint64_t> totals;  // denominators
};

std::vector<Family> families(const GroupRiskTable& t, FairnessMetric metric) {
  std::vector<Family> out;
  const auto column = [&](const std::vector<std::uint64_t>& v, LabelId y) {
    std::vector<std::uint64_t> c(t.num_groups);
    for (GroupId g = 0; g < t.num_groups; ++g) c[g] = v[t.cell(g, y)];
    return c;
  };
  switch (metric) {
    case FairnessMetric::ore:
      out.push_back(Family{t.err_g, t.m_g});
      break;
    case FairnessMetric::eo:
      for (LabelId y = 0; y < t.num_labels; ++y) out.push_back(Family{column(t.err_gy, y), column(t.m_gy, y)});
      break;
    case FairnessMetric::dp:
      for (LabelId y = 0; y < t.num_labels; ++y) out.push_back(Family{column(t.pred_gy, y), t.m_g});
      break;
  }
  for (const Family& f : out)
    for (std::uint64_t n : f.totals) require(n > 0, ErrorCode::empty_cell, "zero denominator in gap test");
  return out;
}

// |a0/n0 − a1/n1| as the unreduced pair (|a0·n1 − a1·n0|, n0·n1).
template <typename Visit>
void for_each_pair(const GroupRiskTable& t, FairnessMetric metric, Visit&& visit) {
  for (const Family& f : families(t, metric)) {
    for (GroupId g0 = 0; g0 < t.num_groups; ++g0) {
      for (GroupId g1 = g0 + 1; g1 < t.num_groups; ++g1) {
        int128 diff = static_cast<int128>(f.hits[g0]) * f.totals[g1] - static_cast<int128>(f.hits[g1]) * f.totals[g0];
        if (diff < 0) diff = -diff;
        visit(diff, static_cast<int128>(f.totals[g0]) * f.totals[g1]);
      }
    }
  }
}

}  // namespace

bool gap_below_threshold_division_free(const GroupRiskTable& table, FairnessMetric metric, std::uint32_t threshold_micro) {
  table.validate();
  bool below = true;
  for_each_pair(table, metric, [&](int128 diff, int128 den) {
    if (!(diff * kMicroScale < static_cast<int128>(threshold_micro) * den)) below = false;
  });
  return below;
}

Rational division_free_gap(const GroupRiskTable& table, FairnessMetric metric) {
  table.validate();
  int128 best_num = 0, best_den = 1;
  for_each_pair(table, metric, [&](int128 diff, int128 den) {
    if (diff * best_den > best_num * den) {
      best_num = diff;
      best_den = den;
    }
  });
  return Rational::from_wide(best_num, best_den);
}

bool circuit_decision(const GroupRiskTable& table, const FairnessSpec& spec) {
  spec.validate();
  const std::uint32_t t = spec.alpha ? spec.alpha->units : spec.epsilon.units;
  Rational gap(0);
  if (table.num_groups >= 2) {
    if (!gap_below_threshold_division_free(table, spec.metric, t)) return false;
    gap = division_free_gap(table, spec.metric);
  }
  // Sample counts are public; the bound is evaluated on them with the gap found above.
  const std::uint64_t required = min_samples(spec, gap, table.num_groups, table.num_labels);
  for (std::uint64_t n : relevant_counts(table, spec.metric))
    if (n < required) return false;
  return true;
}

GroupRiskTable hardwired_risk_table(const Dataset& data, std::span<const LabelId> predictions) {
  require(predictions.size() == data.size(), ErrorCode::length_mismatch, "prediction count");
  GroupRiskTable t(data.num_groups, data.num_labels);
  std::size_t begin = 0;
  for (GroupId g = 0; g < data.num_groups; ++g) {
    std::size_t end = begin;
    while (end < data.size() && data.samples[end].group == g) ++end;
    t.m_g[g] = end - begin;
    for (std::size_t i = begin; i < end; ++i) {
      const LabelId y = data.samples[i].label;
      const LabelId yhat = predictions[i];
      require(yhat < data.num_labels, ErrorCode::id_out_of_range, "prediction");
      const std::uint64_t wrong = yhat != y ? 1 : 0;  // 1 - b_i
      t.err_g[g] += wrong;
      ++t.m_gy[t.cell(g, y)];
      t.err_gy[t.cell(g, y)] += wrong;
      ++t.pred_gy[t.cell(g, yhat)];
    }
    begin = end;
  }
  require(begin == data.size(), ErrorCode::size_mismatch, "test set is not in canonical group order");
  return t;
}

// ---------------------------------------------------------------------------
// Circuits

namespace {

CircuitResult abort_with(ErrorCode code, std::string detail) { return CircuitAbort{code, std::move(detail)}; }

}  // namespace

CircuitResult circuit_cert(ByteView model_bytes, ByteView bundle_bytes) {
  if (model_bytes.empty() || bundle_bytes.empty()) return abort_with(ErrorCode::size_mismatch, "empty input");
  std::optional<ModelSpec> model;
  try {
    model = deserialize_model(model_bytes);
  } catch (const Error& e) {
    return abort_with(ErrorCode::malformed_model, e.what());
  }
  TestBundle bundle;
  try {
    bundle = decode_test_bundle(bundle_bytes);
  } catch (const Error& e) {
    return abort_with(ErrorCode::size_mismatch, e.what());
  }
  if (bundle.data.empty()) return abort_with(ErrorCode::size_mismatch, "empty test set");
  if (model->dimension() != bundle.data.dimension || model->num_labels() != bundle.data.num_labels)
    return abort_with(ErrorCode::size_mismatch, "model shape does not match test set");
  if (bundle.augmentor.has_value() != (bundle.spec.mode() == TestMode::augmented))
    return abort_with(ErrorCode::size_mismatch, "augmentor presence does not match test mode");
  if (bundle.server_commitment && *bundle.server_commitment != sha3_256(model_bytes))
    return abort_with(ErrorCode::protocol_error, "server input does not match its commitment");

  try {
    // (a) predictions on the (augmented) test set, (b)+(c) correctness bits summed per group
    const Dataset queried = bundle.augmentor ? augment_dataset(*bundle.augmentor, bundle.data) : bundle.data;
    const std::vector<LabelId> predictions = predict_all(*model, queried);
    const GroupRiskTable table = hardwired_risk_table(queried, predictions);
    // (d) gap and sample-bound test
    const CertOutput out{circuit_decision(table, bundle.spec), merkle_root(model_bytes)};
    return CircuitOutput{{}, encode_cert_output(out), {}, {{"b", 1}, {"h", 32}}};
  } catch (const Error& e) {
    const ErrorCode code = e.code() == ErrorCode::empty_cell ? ErrorCode::empty_cell : ErrorCode::size_mismatch;
    return abort_with(code, e.what());
  }
}

CircuitResult circuit_inf(ByteView model_bytes, ByteView x_bytes) {
  std::optional<ModelSpec> model;
  try {
    model = deserialize_model(model_bytes);
  } catch (const Error& e) {
    return abort_with(ErrorCode::malformed_model, e.what());
  }
  if (x_bytes.size() != 4 + 4ull * model->dimension())
    return abort_with(ErrorCode::dimension_mismatch, "input has " + std::to_string(x_bytes.size()) + " bytes");
  ByteReader r(x_bytes);
  Sample x;
  x.group = r.u32();
  x.features.resize(model->dimension());
  for (Q16& f : x.features) f = Q16::from_raw(r.i32());
  try {
    const InfOutput out{predict(*model, x), merkle_root(model_bytes)};
    return CircuitOutput{{}, encode_inf_output(out), {}, {{"yhat", 2}, {"h", 32}}};
  } catch (const Error& e) {
    return abort_with(ErrorCode::size_mismatch, e.what());
  }
}

CircuitResult TrustedDealer::evaluate(CircuitId circuit, ByteView x1, ByteView x2) const {
  switch (circuit) {
    case CircuitId::cert: return circuit_cert(x1, x2);
    case CircuitId::inf: return circuit_inf(x1, x2);
  }
  return abort_with(ErrorCode::circuit_mismatch, "unknown circuit");
}

// ---------------------------------------------------------------------------
// Gate-count model

namespace {
constexpr std::uint64_t kKeccakAndGates = 38'400;
constexpr std::uint64_t kKeccakInputBits = 1'600;
constexpr std::uint64_t kMerkleHashFactor = 2;  // total hashes ≈ twice the input blocks
constexpr std::uint64_t kMultiplyAndPerBit = 185;
constexpr std::uint64_t kAddAndPerBit = 6;
}  // namespace

GateCostReport estimate_gates(std::uint64_t model_byte_count, std::uint64_t weight_bit_count) {
  GateCostReport r;
  r.hash_and_gates_per_input_bit = static_cast<double>(kKeccakAndGates) / kKeccakInputBits;
  const std::uint64_t merkle_per_bit = kMerkleHashFactor * kKeccakAndGates / kKeccakInputBits;
  r.merkle_and_gates_per_input_bit = static_cast<double>(merkle_per_bit);
  r.merkle_total_and_gates = merkle_per_bit * model_byte_count * 8;
  const std::uint64_t inference_per_bit = kMultiplyAndPerBit + kAddAndPerBit;
  r.inference_and_gates_per_weight_bit = static_cast<double>(inference_per_bit);
  r.total_inference_gates = inference_per_bit * weight_bit_count;
  if (r.total_inference_gates > 0)
    r.overhead_ratio = static_cast<double>(r.merkle_total_and_gates) / static_cast<double>(r.total_inference_gates);
  return r;
}

}  // namespace faircert

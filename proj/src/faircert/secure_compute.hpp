#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "faircert/augmentor.hpp"
#include "faircert/crypto.hpp"
#include "faircert/data.hpp"
#include "faircert/fairness.hpp"
#include "faircert/model.hpp"

namespace faircert {

enum class Party : std::uint8_t { p1 = 1, p2 = 2 };
enum class CircuitId : std::uint8_t { cert = 1, inf = 2 };
enum class SessionState : std::uint8_t { awaiting_input, ready, computed, delivered, aborted };

std::string party_name(Party party);
std::string circuit_name(CircuitId circuit);
std::string state_name(SessionState state);

/// One datum handed to a party by the functionality.
struct LeakageEntry {
  Party party;
  std::string datum;
  std::size_t length;
  friend bool operator==(const LeakageEntry&, const LeakageEntry&) = default;
};

/// One message exchanged with the functionality. No timestamps, so transcripts replay exactly.
struct TranscriptLine {
  std::uint64_t seq;
  Party party;
  std::string kind;
  std::size_t length;
  Digest payload_digest;
};

struct OutputField {
  std::string name;
  std::size_t length;
};

struct CircuitOutput {
  Bytes y1;
  Bytes y2;
  std::vector<OutputField> y1_fields;
  std::vector<OutputField> y2_fields;
};

struct CircuitAbort {
  ErrorCode reason;
  std::string detail;
};

using CircuitResult = std::variant<CircuitOutput, CircuitAbort>;

/// Backend that evaluates a circuit on both parties' inputs. The trusted dealer
/// is the in-process reference; a real MPC engine would implement the same call.
class Functionality {
 public:
  virtual ~Functionality() = default;
  virtual CircuitResult evaluate(CircuitId circuit, ByteView x1, ByteView x2) const = 0;
};

class TrustedDealer final : public Functionality {
 public:
  CircuitResult evaluate(CircuitId circuit, ByteView x1, ByteView x2) const override;
};

struct PartyOutput {
  bool aborted = false;
  Bytes payload;
};

/// The ideal secure-computation functionality: Input, Compute, Output, with Abort
/// on unsuitable input sizes. Single owner; not thread-safe.
class FscSession {
 public:
  explicit FscSession(std::shared_ptr<const Functionality> backend = std::make_shared<TrustedDealer>());

  /// WRONG_STATE if the party already gave input or computation has started.
  void input(Party party, Bytes payload);
  /// Both parties must request the same circuit. WRONG_STATE before both inputs;
  /// CIRCUIT_MISMATCH (session aborts) when the ids differ.
  void compute(Party party, CircuitId circuit);
  /// Delivers the party's designated output once. WRONG_STATE before computation.
  PartyOutput output(Party party);

  SessionState state() const noexcept { return state_; }
  std::optional<CircuitId> circuit() const noexcept { return circuit_; }
  std::optional<CircuitAbort> abort_reason() const { return abort_; }
  const std::vector<LeakageEntry>& leakage_log() const noexcept { return leakage_; }
  const std::vector<TranscriptLine>& transcript() const noexcept { return transcript_; }

  std::vector<LeakageEntry> deliveries_to(Party party) const;

  /// "seq party kind length digest" per line.
  std::string audit_text() const;

 private:
  static std::size_t slot(Party p) { return p == Party::p1 ? 0 : 1; }
  void record(Party party, std::string kind, ByteView payload);

  std::shared_ptr<const Functionality> backend_;
  SessionState state_ = SessionState::awaiting_input;
  std::optional<Bytes> inputs_[2];
  std::optional<CircuitId> requested_[2];
  bool delivered_[2] = {false, false};
  std::optional<CircuitId> circuit_;
  std::optional<CircuitOutput> result_;
  std::optional<CircuitAbort> abort_;
  std::vector<LeakageEntry> leakage_;
  std::vector<TranscriptLine> transcript_;
  std::uint64_t seq_ = 0;
};

/// Regulator's input to the certification circuit.
struct TestBundle {
  Dataset data;  // canonical (group-sorted) order
  FairnessSpec spec;
  std::optional<AugmentorConfig> augmentor;   // with master seed, augmented mode only
  std::optional<Digest> server_commitment;     // SHA3-256 of the server's input, augmented mode only
};

Bytes encode_test_bundle(const TestBundle& bundle);
TestBundle decode_test_bundle(ByteView bytes);

/// Client's input to the inference circuit: group u32 | features i32 LE.
Bytes encode_inference_input(const Sample& x);

struct CertOutput {
  bool fair = false;
  ModelDigest h;
};
struct InfOutput {
  LabelId label = 0;
  ModelDigest h;
};
Bytes encode_cert_output(const CertOutput& out);
CertOutput decode_cert_output(ByteView bytes);
Bytes encode_inf_output(const InfOutput& out);
InfOutput decode_inf_output(ByteView bytes);

/// K_cert: predictions, correctness bits, per-group sums over hard-wired group
/// ranges, division-free gap test and the sample-bound test; also h = merkle_root(model).
CircuitResult circuit_cert(ByteView model_bytes, ByteView bundle_bytes);
/// K_inf: yhat = M(x) and h = merkle_root(model) for the client; nothing for the server.
CircuitResult circuit_inf(ByteView model_bytes, ByteView x_bytes);

/// EFG < t_micro / 10^6 decided by cross-multiplication only:
/// |a_0·n_1 − a_1·n_0| · 10^6 < t · n_0 · n_1 for every pair.
bool gap_below_threshold_division_free(const GroupRiskTable& table, FairnessMetric metric, std::uint32_t threshold_micro);

/// Largest pairwise gap, selected by cross-multiplied comparisons; reduced at the end.
Rational division_free_gap(const GroupRiskTable& table, FairnessMetric metric);

/// The certification bit as the circuit computes it.
bool circuit_decision(const GroupRiskTable& table, const FairnessSpec& spec);

/// Per-group sums over contiguous group ranges of a canonical-order dataset.
GroupRiskTable hardwired_risk_table(const Dataset& canonical, std::span<const LabelId> predictions);

struct GateCostReport {
  double hash_and_gates_per_input_bit = 0;    // Keccak-f: 38400 / 1600
  double merkle_and_gates_per_input_bit = 0;  // two hashes per input block
  std::uint64_t merkle_total_and_gates = 0;
  double inference_and_gates_per_weight_bit = 0;  // 185 multiply + 6 add
  std::uint64_t total_inference_gates = 0;
  std::optional<double> overhead_ratio;  // hashing / inference; empty when there are no weight bits
};

GateCostReport estimate_gates(std::uint64_t model_byte_count, std::uint64_t weight_bit_count);

}  // namespace faircert

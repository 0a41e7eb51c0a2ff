#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faircert/augmentor.hpp"
#include "faircert/crypto.hpp"
#include "faircert/data.hpp"
#include "faircert/fairness.hpp"
#include "faircert/model.hpp"
#include "faircert/secure_compute.hpp"
#include "faircert/transport.hpp"
#include "faircert/wire.hpp"

namespace faircert {

struct RegulatorParty {
  KeyPair keys;
  Dataset test_set;
  FairnessSpec spec;
  std::optional<AugmentorConfig> augmentor;  // augmented mode; master_seed is the fresh per-test seed
  std::uint16_t protocol_version = kProtocolVersion;
};

struct ServerParty {
  ModelSpec model;
  std::optional<Bytes> certificate_file;  // filled in by a successful certification
  std::optional<PublicKey> regulator_vk;  // cert_ID as received

  // Deviations available to the adversarial harness.
  std::optional<ModelSpec> inference_model;   // fed to the inference circuit instead of `model`
  std::optional<Bytes> certificate_override;  // presented to clients instead of certificate_file
};

struct ClientParty {
  PublicKey regulator_vk{};
  Sample x;
  FairnessSpec requested;
  std::uint16_t protocol_version = kProtocolVersion;
};

/// Publishes cert_ID. Returns the verification key; its id is key_id(vk).
PublicKey setup(const RegulatorParty& regulator);

struct PrecheckResult {
  bool ok = false;
  std::uint64_t required = 0;            // per relevant cell, EFG assumed 0
  std::vector<std::uint64_t> counts;     // m_g, or m_gy for EO
};
/// Step-1 gate run before any contact with the server.
PrecheckResult precheck(const FairnessSpec& spec, const Dataset& test_set);

/// What the dealer saw, for audits.
struct DealerRecord {
  bool ran = false;
  SessionState final_state = SessionState::awaiting_input;
  std::optional<CircuitAbort> abort;
  std::vector<LeakageEntry> leakage;
  std::string audit;
  std::string detail;  // non-empty if the dealer itself failed
};

enum class CertStatus : std::uint8_t { certified = 0, not_fair, precheck_failed, fsc_abort, protocol_error };
std::string cert_status_name(CertStatus status);

struct CertificationOutcome {
  CertStatus status = CertStatus::protocol_error;
  std::string detail;
  std::optional<Certificate> certificate;
  Bytes certificate_file;
  std::optional<ModelDigest> digest;  // h as delivered by F_SC
  PrecheckResult precheck;
  DealerRecord dealer;
  std::map<std::string, std::vector<WireEvent>> transcripts;  // per role
};

enum class InferStatus : std::uint8_t { accepted = 0, sig_invalid, spec_mismatch, no_certificate, fsc_abort, protocol_error };
std::string infer_status_name(InferStatus status);

struct InferenceOutcome {
  InferStatus status = InferStatus::protocol_error;
  std::string detail;
  std::optional<LabelId> label;  // set only when accepted
  std::optional<InfOutput> fsc_output;
  DealerRecord dealer;
  std::map<std::string, std::vector<WireEvent>> transcripts;
};

enum class ServerStatus : std::uint8_t { certified = 0, not_fair, served, aborted, protocol_error };

struct ServerSessionResult {
  ServerStatus status = ServerStatus::protocol_error;
  std::string detail;
};

// Role state machines. Each is sequential and talks only through its channels,
// so the same code runs over in-process queues and TCP.
CertificationOutcome regulator_certify(const RegulatorParty& regulator, Channel& server, Channel& dealer);
InferenceOutcome client_infer(const ClientParty& client, Channel& server, Channel& dealer);
/// Serves one session (certification or inference) from `peer`.
ServerSessionResult server_session(ServerParty& server, Channel& peer, Channel& dealer);
/// Runs one F_SC session. Parties are identified by their HELLO roles: the server is P1.
DealerRecord dealer_session(Channel& first, Channel& second,
                            std::shared_ptr<const Functionality> backend = std::make_shared<TrustedDealer>());

enum class TransportKind : std::uint8_t { in_process, tcp };

/// Drives all three roles (regulator, server, dealer) in this process over the chosen transport.
/// On success the server's certificate_file is set.
CertificationOutcome run_certification(ServerParty& server, const RegulatorParty& regulator,
                                       TransportKind transport = TransportKind::in_process);
InferenceOutcome run_inference(const ClientParty& client, const ServerParty& server,
                               TransportKind transport = TransportKind::in_process);

}  // namespace faircert

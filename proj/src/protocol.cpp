#include "faircert/protocol.hpp"

#include <thread>

namespace faircert {

std::string cert_status_name(CertStatus status) {
  switch (status) {
    case CertStatus::certified: return "CERTIFIED";
    case CertStatus::not_fair: return "NOT_FAIR";
    case CertStatus::precheck_failed: return "PRECHECK_FAILED";
    case CertStatus::fsc_abort: return "FSC_ABORT";
    case CertStatus::protocol_error: return "PROTOCOL_ERROR";
  }
  return "UNKNOWN";
}

std::string infer_status_name(InferStatus status) {
  switch (status) {
    case InferStatus::accepted: return "ACCEPTED";
    case InferStatus::sig_invalid: return "SIG_INVALID";
    case InferStatus::spec_mismatch: return "SPEC_MISMATCH";
    case InferStatus::no_certificate: return "NO_CERTIFICATE";
    case InferStatus::fsc_abort: return "FSC_ABORT";
    case InferStatus::protocol_error: return "PROTOCOL_ERROR";
  }
  return "UNKNOWN";
}

PublicKey setup(const RegulatorParty& regulator) { return regulator.keys.verification_key; }

PrecheckResult precheck(const FairnessSpec& spec, const Dataset& test_set) {
  spec.validate();
  test_set.validate();
  PrecheckResult r;
  r.required = min_samples(spec, Rational(0), test_set.num_groups, test_set.num_labels);
  std::vector<LabelId> labels;
  labels.reserve(test_set.samples.size());
  for (const Sample& s : test_set.samples) labels.push_back(s.label);
  r.counts = relevant_counts(build_risk_table(test_set, labels), spec.metric);
  r.ok = !r.counts.empty();
  for (std::uint64_t c : r.counts) r.ok = r.ok && c >= r.required;
  return r;
}

namespace {

void best_effort_abort(Channel& ch) {
  try {
    ch.send(abort_frame());
  } catch (const std::exception&) {
  }
}

/// Sends our HELLO and checks the reply. Returns false if the peer answered ABORT.
bool handshake(Channel& ch, Role self, std::uint16_t version, Role expected_peer) {
  ch.send(hello_frame({self, version}));
  const Frame reply = ch.recv();
  if (reply.type == FrameType::abort) return false;
  const Hello h = parse_hello(reply);
  require(h.role == expected_peer, ErrorCode::protocol_error, "unexpected peer role " + role_name(h.role));
  if (h.version != version) {
    best_effort_abort(ch);
    fail(ErrorCode::protocol_error, "protocol version mismatch");
  }
  return true;
}

/// Server side of HELLO: reads the peer's hello and answers, or answers ABORT on a version mismatch.
Hello answer_hello(Channel& ch, Role self) {
  const Hello h = parse_hello(ch.recv());
  if (h.version != kProtocolVersion) {
    best_effort_abort(ch);
    fail(ErrorCode::protocol_error, "protocol version mismatch");
  }
  ch.send(hello_frame({self, kProtocolVersion}));
  return h;
}

}  // namespace

CertificationOutcome regulator_certify(const RegulatorParty& reg, Channel& server, Channel& dealer) {
  CertificationOutcome out;
  out.precheck = precheck(reg.spec, reg.test_set);
  if (!out.precheck.ok) {
    out.status = CertStatus::precheck_failed;
    out.detail = "test set needs " + std::to_string(out.precheck.required) + " samples per cell";
    return out;
  }
  const bool augmented = reg.spec.mode() == TestMode::augmented;
  try {
    require(reg.augmentor.has_value() == augmented, ErrorCode::invalid_argument,
            "augmentor must be configured exactly in augmented mode");
    if (!handshake(server, Role::regulator, reg.protocol_version, Role::server)) {
      best_effort_abort(dealer);
      out.status = CertStatus::protocol_error;
      out.detail = "server aborted the handshake";
      return out;
    }
    server.send(cert_id_frame(setup(reg)));
    server.send(cert_request_frame({reg.spec, static_cast<std::uint32_t>(reg.test_set.samples.size()), reg.augmentor}));

    if (!handshake(dealer, Role::regulator, reg.protocol_version, Role::dealer)) {
      best_effort_abort(server);
      out.status = CertStatus::fsc_abort;
      out.detail = "dealer aborted the handshake";
      return out;
    }

    std::optional<Digest> commitment;
    if (augmented) {
      // the server fixes its model before the augmentor randomness is known
      const Frame f = server.recv();
      if (f.type == FrameType::abort) {
        best_effort_abort(dealer);
        out.status = CertStatus::protocol_error;
        out.detail = "server aborted before committing";
        return out;
      }
      const FscInput c = parse_fsc_input(f);
      require(c.circuit == CircuitId::cert && c.payload.size() == 32, ErrorCode::protocol_error, "bad commitment");
      Digest d{};
      std::copy(c.payload.begin(), c.payload.end(), d.begin());
      commitment = d;
      server.send(seed_reveal_frame(reg.augmentor->master_seed));
    }

    const TestBundle bundle{canonical_order(reg.test_set), reg.spec, reg.augmentor, commitment};
    dealer.send(fsc_input_frame({CircuitId::cert, encode_test_bundle(bundle)}));

    const Frame result = dealer.recv();
    if (result.type == FrameType::abort) {
      best_effort_abort(server);
      out.status = CertStatus::fsc_abort;
      out.detail = "secure computation aborted";
      return out;
    }
    const CertOutput y = parse_fsc_result(result);
    out.digest = y.h;
    if (!y.fair) {
      server.send(reject_frame(RejectReason::not_fair));
      out.status = CertStatus::not_fair;
      return out;
    }
    out.certificate = issue_certificate(reg.keys, y.h, reg.spec);
    out.certificate_file = encode_certificate(*out.certificate);
    server.send(certificate_frame(out.certificate_file));
    out.status = CertStatus::certified;
  } catch (const Error& e) {
    best_effort_abort(server);
    best_effort_abort(dealer);
    out.status = CertStatus::protocol_error;
    out.detail = e.what();
  }
  return out;
}

InferenceOutcome client_infer(const ClientParty& client, Channel& server, Channel& dealer) {
  InferenceOutcome out;
  try {
    if (!handshake(server, Role::client, client.protocol_version, Role::server)) {
      best_effort_abort(dealer);
      out.detail = "server aborted the handshake";
      return out;
    }
    server.send(infer_request_frame(client.requested));
    const Frame cert_frame = server.recv();
    if (cert_frame.type != FrameType::certificate) {
      best_effort_abort(dealer);
      if (cert_frame.type == FrameType::reject && parse_reject(cert_frame) == RejectReason::no_certificate) {
        out.status = InferStatus::no_certificate;
        out.detail = "server holds no certificate";
      } else {
        out.detail = "expected CERTIFICATE, got " + frame_type_name(cert_frame.type);
      }
      return out;
    }

    if (!handshake(dealer, Role::client, client.protocol_version, Role::dealer)) {
      out.status = InferStatus::fsc_abort;
      out.detail = "dealer aborted the handshake";
      return out;
    }
    dealer.send(fsc_input_frame({CircuitId::inf, encode_inference_input(client.x)}));
    const Frame result = dealer.recv();
    if (result.type == FrameType::abort) {
      out.status = InferStatus::fsc_abort;
      out.detail = "secure computation aborted";
      return out;
    }
    const InfOutput y = parse_infer_result(result);
    out.fsc_output = y;

    Certificate cert;
    try {
      cert = decode_certificate(cert_frame.payload);
    } catch (const Error& e) {
      out.status = InferStatus::sig_invalid;
      out.detail = std::string("undecodable certificate: ") + e.what();
      return out;
    }
    if (!(cert.spec == client.requested)) {
      out.status = InferStatus::spec_mismatch;
      out.detail = "certificate spec " + cert.spec.fairness_string + " eps=" + cert.spec.epsilon.to_string() +
                   " delta=" + cert.spec.delta.to_string() + " does not match the request";
      return out;
    }
    if (cert.regulator_key_id != key_id(client.regulator_vk)) {
      out.status = InferStatus::sig_invalid;
      out.detail = "certificate names a different regulator key";
      return out;
    }
    if (!verify(client.regulator_vk, certificate_message(y.h, client.requested), cert.signature)) {
      out.status = InferStatus::sig_invalid;
      out.detail = "signature does not cover the evaluated model";
      return out;
    }
    out.status = InferStatus::accepted;
    out.label = y.label;
  } catch (const Error& e) {
    best_effort_abort(server);
    best_effort_abort(dealer);
    out.status = InferStatus::protocol_error;
    out.detail = e.what();
  }
  return out;
}

ServerSessionResult server_session(ServerParty& s, Channel& peer, Channel& dealer) {
  ServerSessionResult res;
  try {
    const Hello hello = answer_hello(peer, Role::server);
    Frame f = peer.recv();

    if (hello.role == Role::client) {
      parse_infer_request(f);  // the demanded spec is the client's business
      const std::optional<Bytes>& cert = s.certificate_override ? s.certificate_override : s.certificate_file;
      if (!cert) {
        peer.send(reject_frame(RejectReason::no_certificate));
        best_effort_abort(dealer);
        res.status = ServerStatus::aborted;
        res.detail = "no certificate to present";
        return res;
      }
      peer.send(certificate_frame(*cert));
      if (!handshake(dealer, Role::server, kProtocolVersion, Role::dealer)) {
        res.status = ServerStatus::aborted;
        res.detail = "dealer aborted the handshake";
        return res;
      }
      dealer.send(fsc_input_frame({CircuitId::inf, serialize_model(s.inference_model ? *s.inference_model : s.model)}));
      res.status = ServerStatus::served;
      return res;
    }

    require(hello.role == Role::regulator, ErrorCode::protocol_error, "unexpected peer role " + role_name(hello.role));
    s.regulator_vk = parse_cert_id(f);
    const CertRequest request = parse_cert_request(peer.recv());
    const Bytes model_bytes = serialize_model(s.model);

    if (!handshake(dealer, Role::server, kProtocolVersion, Role::dealer)) {
      res.status = ServerStatus::aborted;
      res.detail = "dealer aborted the handshake";
      return res;
    }
    dealer.send(fsc_input_frame({CircuitId::cert, model_bytes}));
    if (request.spec.mode() == TestMode::augmented) {
      const Digest commitment = sha3_256(model_bytes);
      peer.send(fsc_input_frame({CircuitId::cert, Bytes(commitment.begin(), commitment.end())}));
      parse_seed_reveal(peer.recv());
    }

    f = peer.recv();
    switch (f.type) {
      case FrameType::certificate:
        decode_certificate(f.payload);
        s.certificate_file = f.payload;
        res.status = ServerStatus::certified;
        break;
      case FrameType::reject:
        parse_reject(f);
        res.status = ServerStatus::not_fair;
        break;
      case FrameType::abort:
        res.status = ServerStatus::aborted;
        res.detail = "regulator aborted";
        break;
      default:
        fail(ErrorCode::protocol_error, "unexpected " + frame_type_name(f.type));
    }
  } catch (const Error& e) {
    best_effort_abort(peer);
    best_effort_abort(dealer);
    res.status = ServerStatus::protocol_error;
    res.detail = e.what();
  }
  return res;
}

DealerRecord dealer_session(Channel& first, Channel& second, std::shared_ptr<const Functionality> backend) {
  DealerRecord rec;
  rec.ran = true;
  FscSession session(std::move(backend));
  Channel* links[2] = {&first, &second};
  Channel* party[2] = {nullptr, nullptr};  // P1 (server), P2 (regulator or client)
  try {
    for (Channel* ch : links) {
      const Hello h = answer_hello(*ch, Role::dealer);
      require(h.role != Role::dealer, ErrorCode::protocol_error, "dealer cannot be a party");
      const int slot = h.role == Role::server ? 0 : 1;
      require(party[slot] == nullptr, ErrorCode::protocol_error, "two parties claim the same slot");
      party[slot] = ch;
    }
    const FscInput x1 = parse_fsc_input(party[0]->recv());
    const FscInput x2 = parse_fsc_input(party[1]->recv());
    session.input(Party::p1, x1.payload);
    session.input(Party::p2, x2.payload);
    session.compute(Party::p1, x1.circuit);
    try {
      session.compute(Party::p2, x2.circuit);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::circuit_mismatch) throw;
    }
    session.output(Party::p1);  // y1 is empty for both circuits
    const PartyOutput y2 = session.output(Party::p2);
    if (y2.aborted) {
      for (Channel* ch : links) best_effort_abort(*ch);
    } else {
      const FrameType type = *session.circuit() == CircuitId::cert ? FrameType::fsc_result : FrameType::infer_result;
      party[1]->send(Frame{type, y2.payload});
    }
  } catch (const Error& e) {
    rec.detail = e.what();
    for (Channel* ch : links) best_effort_abort(*ch);
  }
  rec.final_state = session.state();
  rec.abort = session.abort_reason();
  rec.leakage = session.leakage_log();
  rec.audit = session.audit_text();
  return rec;
}

namespace {

/// Six channel endpoints connecting front (regulator or client), server and dealer.
struct Mesh {
  std::unique_ptr<Channel> front_server, server_front, front_dealer, dealer_front, server_dealer, dealer_server;
};

Mesh build_mesh(TransportKind kind) {
  Mesh m;
  if (kind == TransportKind::in_process) {
    std::tie(m.front_server, m.server_front) = make_in_process_pair();
    std::tie(m.front_dealer, m.dealer_front) = make_in_process_pair();
    std::tie(m.server_dealer, m.dealer_server) = make_in_process_pair();
    return m;
  }
  TcpListener server_listener("127.0.0.1", 0);
  TcpListener dealer_listener("127.0.0.1", 0);
  // connects complete against the listen backlog, so one thread can wire everything
  m.front_server = TcpChannel::connect("127.0.0.1", server_listener.port());
  m.server_front = server_listener.accept();
  m.front_dealer = TcpChannel::connect("127.0.0.1", dealer_listener.port());
  m.dealer_front = dealer_listener.accept();
  m.server_dealer = TcpChannel::connect("127.0.0.1", dealer_listener.port());
  m.dealer_server = dealer_listener.accept();
  return m;
}

struct ThreeRoleRun {
  ServerSessionResult server;
  DealerRecord dealer;
  std::map<std::string, std::vector<WireEvent>> transcripts;
};

template <class Front>
ThreeRoleRun run_three(TransportKind kind, const std::string& front_name, ServerParty& server, Front&& front) {
  Mesh mesh = build_mesh(kind);
  auto front_log = std::make_shared<WireLog>();
  auto server_log = std::make_shared<WireLog>();
  auto dealer_log = std::make_shared<WireLog>();
  ThreeRoleRun run;

  std::jthread dealer_thread([&, a = std::move(mesh.dealer_server), b = std::move(mesh.dealer_front)]() mutable {
    try {
      RecordingChannel to_server(*a, dealer_log, "server");
      RecordingChannel to_front(*b, dealer_log, front_name);
      run.dealer = dealer_session(to_server, to_front);
    } catch (const std::exception& e) {
      run.dealer.detail = e.what();
    }
    a.reset();
    b.reset();
  });
  std::jthread server_thread([&, a = std::move(mesh.server_front), b = std::move(mesh.server_dealer)]() mutable {
    try {
      RecordingChannel to_front(*a, server_log, front_name);
      RecordingChannel to_dealer(*b, server_log, "dealer");
      run.server = server_session(server, to_front, to_dealer);
    } catch (const std::exception& e) {
      run.server.detail = e.what();
    }
    a.reset();
    b.reset();
  });
  {
    RecordingChannel to_server(*mesh.front_server, front_log, "server");
    RecordingChannel to_dealer(*mesh.front_dealer, front_log, "dealer");
    front(to_server, to_dealer);
  }
  mesh.front_server.reset();
  mesh.front_dealer.reset();
  server_thread.join();
  dealer_thread.join();

  run.transcripts[front_name] = front_log->events();
  run.transcripts["server"] = server_log->events();
  run.transcripts["dealer"] = dealer_log->events();
  return run;
}

}  // namespace

CertificationOutcome run_certification(ServerParty& server, const RegulatorParty& regulator, TransportKind transport) {
  CertificationOutcome out;
  out.precheck = precheck(regulator.spec, regulator.test_set);
  if (!out.precheck.ok) {
    out.status = CertStatus::precheck_failed;
    out.detail = "test set needs " + std::to_string(out.precheck.required) + " samples per cell";
    return out;
  }
  ThreeRoleRun run = run_three(transport, "regulator", server, [&](Channel& s, Channel& d) {
    out = regulator_certify(regulator, s, d);
  });
  out.dealer = std::move(run.dealer);
  out.transcripts = std::move(run.transcripts);
  return out;
}

InferenceOutcome run_inference(const ClientParty& client, const ServerParty& server, TransportKind transport) {
  InferenceOutcome out;
  ServerParty copy = server;
  ThreeRoleRun run = run_three(transport, "client", copy, [&](Channel& s, Channel& d) {
    out = client_infer(client, s, d);
  });
  out.dealer = std::move(run.dealer);
  out.transcripts = std::move(run.transcripts);
  return out;
}

}  // namespace faircert

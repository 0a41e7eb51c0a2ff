#include "doctest.h"

#include <algorithm>

#include "scenarios.hpp"

using namespace faircert;
using namespace faircert::testing;

namespace {

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

FrameType type_of(const WireEvent& e) { return decode_frame(e.frame).type; }

std::vector<FrameType> types(const std::vector<WireEvent>& events, bool outbound) {
  std::vector<FrameType> out;
  for (const WireEvent& e : events)
    if (e.outbound == outbound) out.push_back(type_of(e));
  return out;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("frame codec") {
  const Frame f{FrameType::seed_reveal, Bytes{1, 2, 3, 4, 5, 6, 7, 8}};
  const Bytes enc = encode_frame(f);
  CHECK(enc.size() == 5 + 8);
  CHECK(enc[0] == 9);
  CHECK(enc[4] == 0x07);
  CHECK(decode_frame(enc) == f);
  Bytes bad = enc;
  bad[4] = 0x0C;
  CHECK_THROWS_WITH_AS(decode_frame(bad), doctest::Contains("PROTOCOL_ERROR"), Error);
  bad = enc;
  bad[0] = 10;
  CHECK_THROWS_AS(decode_frame(bad), Error);
  CHECK_THROWS_AS(decode_frame(Bytes{0, 0, 0, 0, 1}), Error);
  CHECK(decode_frame(encode_frame(abort_frame())).type == FrameType::abort);
  for (std::uint8_t t = 1; t <= 0x0B; ++t) CHECK(static_cast<std::uint8_t>(checked_frame_type(t)) == t);
  CHECK_THROWS_AS(checked_frame_type(0), Error);
}

TEST_CASE("payload codecs round trip") {
  const Hello h = parse_hello(hello_frame(Hello{Role::dealer, 7}));
  CHECK(h.role == Role::dealer);
  CHECK(h.version == 7);

  const KeyPair kp = keys_from(3);
  CHECK(parse_cert_id(decode_frame(encode_frame(cert_id_frame(kp.verification_key)))) == kp.verification_key);

  AugmentorConfig aug;
  aug.master_seed = 0x1234;
  aug.noise_sigma = Q16::from_double(0.5);
  aug.mask_prob = Micro{100};
  const FairnessSpec aspec = FairnessSpec::make(FairnessMetric::eo, Micro{1}, Micro{2}, Micro{3});
  const CertRequest req = parse_cert_request(cert_request_frame(CertRequest{aspec, 777, aug}));
  CHECK(req.spec == aspec);
  CHECK(req.total_m == 777);
  REQUIRE(req.augmentor);
  CHECK(req.augmentor->master_seed == 0);  // withheld
  CHECK(req.augmentor->noise_sigma == aug.noise_sigma);
  CHECK_FALSE(parse_cert_request(cert_request_frame(CertRequest{default_spec(), 5, {}})).augmentor);

  const FscInput in = parse_fsc_input(fsc_input_frame(FscInput{CircuitId::inf, Bytes{9, 9}}));
  CHECK(in.circuit == CircuitId::inf);
  CHECK(in.payload == Bytes{9, 9});

  const CertOutput co = parse_fsc_result(fsc_result_frame(CertOutput{true, merkle_root(Bytes{1})}));
  CHECK(co.fair);
  CHECK(co.h == merkle_root(Bytes{1}));
  CHECK(parse_seed_reveal(seed_reveal_frame(0xdeadbeefcafeULL)) == 0xdeadbeefcafeULL);
  CHECK(parse_infer_request(infer_request_frame(aspec)) == aspec);
  const InfOutput io = parse_infer_result(infer_result_frame(InfOutput{3, merkle_root(Bytes{2})}));
  CHECK(io.label == 3);
  CHECK(io.h == merkle_root(Bytes{2}));
  for (auto r : {RejectReason::not_fair, RejectReason::sig_invalid, RejectReason::spec_mismatch, RejectReason::no_certificate})
    CHECK(parse_reject(reject_frame(r)) == r);

  // parsers check the frame type
  CHECK_THROWS_AS(parse_hello(abort_frame()), Error);
  CHECK_THROWS_AS(parse_seed_reveal(Frame{FrameType::seed_reveal, Bytes{1}}), Error);
}

TEST_CASE("setup publishes distinct keys") {
  const World a = make_world(1, 10), b = make_world(2, 10);
  CHECK(setup(a.regulator) == a.keys.verification_key);
  CHECK(setup(a.regulator) != setup(b.regulator));
  CHECK(key_id(setup(a.regulator)) == sha3_256(a.keys.verification_key));
}

TEST_CASE("precheck") {
  const World w = make_world(4, 1100);
  const PrecheckResult p = precheck(w.regulator.spec, w.regulator.test_set);
  CHECK(p.required == 1016);
  CHECK(p.counts == std::vector<std::uint64_t>{1100, 1100});
  CHECK(p.ok);
  const FairnessSpec eo = FairnessSpec::make(FairnessMetric::eo, Micro{100'000}, Micro{50'000});
  CHECK(precheck(eo, w.regulator.test_set).counts.size() == 4);
}

TEST_CASE("five scenarios in process") {
  for (const ScenarioResult& r : run_protocol_scenarios(TransportKind::in_process)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("five scenarios over tcp") {
  for (const ScenarioResult& r : run_protocol_scenarios(TransportKind::tcp, 2)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("certificate verifies against the model digest") {
  World w = make_world(5);
  const CertificationOutcome out = run_certification(w.server, w.regulator);
  REQUIRE(out.status == CertStatus::certified);
  REQUIRE(out.certificate);
  CHECK(out.certificate->digest == merkle_root(serialize_model(w.server.model)));
  CHECK(verify_certificate(w.keys.verification_key, *out.certificate));
  CHECK(decode_certificate(*w.server.certificate_file) == *out.certificate);
  CHECK(w.server.regulator_vk == w.keys.verification_key);
}

TEST_CASE("unfair model is not certified") {
  World w = make_world(6);
  w.plant.error_rates = {Micro{50'000}, Micro{250'000}};
  w.server.model = planted_model(w.plant);
  const CertificationOutcome out = run_certification(w.server, w.regulator);
  CHECK(out.status == CertStatus::not_fair);
  CHECK_FALSE(out.certificate);
  CHECK_FALSE(w.server.certificate_file);
  CHECK(types(out.transcripts.at("regulator"), true).back() == FrameType::reject);
}

TEST_CASE("binding soundness: forged, foreign and replayed signatures") {
  World w = make_world(7);
  REQUIRE(run_certification(w.server, w.regulator).status == CertStatus::certified);
  const Certificate real = decode_certificate(*w.server.certificate_file);
  const ModelDigest h = merkle_root(serialize_model(w.server.model));

  SUBCASE("(i) signature from a different key") {
    Certificate forged = issue_certificate(keys_from(99), h, default_spec());
    forged.regulator_key_id = real.regulator_key_id;
    ServerParty s = w.server;
    s.certificate_override = encode_certificate(forged);
    CHECK(run_inference(client_for(w, default_spec()), s).status == InferStatus::sig_invalid);
    s.certificate_override = encode_certificate(issue_certificate(keys_from(99), h, default_spec()));
    CHECK(run_inference(client_for(w, default_spec()), s).status == InferStatus::sig_invalid);
  }
  SUBCASE("(ii) signature for a different model") {
    const ModelSpec other = tamper_weight(w.server.model);
    ServerParty s = w.server;
    s.certificate_override = encode_certificate(issue_certificate(w.keys, merkle_root(serialize_model(other)), default_spec()));
    CHECK(run_inference(client_for(w, default_spec()), s).status == InferStatus::sig_invalid);
  }
  SUBCASE("(iii) replayed signature with edited spec") {
    const FairnessSpec tighter = FairnessSpec::make(FairnessMetric::ore, Micro{50'000}, Micro{50'000});
    Certificate replay = real;
    replay.spec = tighter;
    ServerParty s = w.server;
    s.certificate_override = encode_certificate(replay);
    CHECK(run_inference(client_for(w, tighter), s).status == InferStatus::sig_invalid);
    replay.spec = FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{10'000});
    s.certificate_override = encode_certificate(replay);
    CHECK(run_inference(client_for(w, replay.spec), s).status == InferStatus::sig_invalid);
  }
  SUBCASE("garbage certificate bytes") {
    ServerParty s = w.server;
    s.certificate_override = Bytes{1, 2, 3};
    CHECK(run_inference(client_for(w, default_spec()), s).status == InferStatus::sig_invalid);
  }
}

TEST_CASE("inference without a certificate") {
  const World w = make_world(8, 10);
  const InferenceOutcome out = run_inference(client_for(w, default_spec()), w.server);
  CHECK(out.status == InferStatus::no_certificate);
  CHECK_FALSE(out.label);
}

TEST_CASE("augmented mode commits before the seed is revealed") {
  World w = make_world(9);
  w.regulator.spec = FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{50'000}, Micro{100'000});
  AugmentorConfig aug;
  aug.master_seed = 4242;
  aug.noise_sigma = Q16::from_double(0.1);
  aug.mask_prob = Micro{50'000};
  w.regulator.augmentor = aug;
  const CertificationOutcome out = run_certification(w.server, w.regulator);
  INFO(out.detail);
  REQUIRE(out.status == CertStatus::certified);
  CHECK(out.certificate->spec.fairness_string == "ORE/augmented");

  const auto& server_log = out.transcripts.at("server");
  std::ptrdiff_t commit_at = -1, reveal_at = -1;
  for (std::size_t i = 0; i < server_log.size(); ++i) {
    const Frame f = decode_frame(server_log[i].frame);
    if (server_log[i].link == "regulator" && server_log[i].outbound && f.type == FrameType::fsc_input) {
      commit_at = static_cast<std::ptrdiff_t>(i);
      CHECK(parse_fsc_input(f).payload.size() == 32);
    }
    if (!server_log[i].outbound && f.type == FrameType::seed_reveal) {
      reveal_at = static_cast<std::ptrdiff_t>(i);
      CHECK(parse_seed_reveal(f) == 4242);
    }
    if (!server_log[i].outbound && f.type == FrameType::cert_request) CHECK(parse_cert_request(f).augmentor->master_seed == 0);
  }
  CHECK(commit_at >= 0);
  CHECK(reveal_at > commit_at);

  const InferenceOutcome inf = run_inference(client_for(w, w.regulator.spec), w.server);
  CHECK(inf.status == InferStatus::accepted);
}

TEST_CASE("protocol version mismatch aborts") {
  World w = make_world(10);
  w.regulator.protocol_version = 2;
  const CertificationOutcome out = run_certification(w.server, w.regulator);
  CHECK(out.status == CertStatus::protocol_error);
  const auto sent = types(out.transcripts.at("server"), true);
  CHECK(std::find(sent.begin(), sent.end(), FrameType::abort) != sent.end());
  CHECK_FALSE(w.server.certificate_file);

  World c = make_world(10);
  REQUIRE(run_certification(c.server, c.regulator).status == CertStatus::certified);
  ClientParty client = client_for(c, default_spec());
  client.protocol_version = 9;
  CHECK(run_inference(client, c.server).status == InferStatus::protocol_error);
}

TEST_CASE("transcripts are deterministic") {
  for (auto transport : {TransportKind::in_process, TransportKind::tcp}) {
    World a = make_world(11), b = make_world(11);
    const CertificationOutcome ca = run_certification(a.server, a.regulator, transport);
    const CertificationOutcome cb = run_certification(b.server, b.regulator, transport);
    REQUIRE(ca.status == CertStatus::certified);
    CHECK(ca.transcripts == cb.transcripts);
    CHECK(wire_log_text(ca.transcripts.at("dealer")) == wire_log_text(cb.transcripts.at("dealer")));
    CHECK(ca.dealer.audit == cb.dealer.audit);
    const InferenceOutcome ia = run_inference(client_for(a, default_spec()), a.server, transport);
    const InferenceOutcome ib = run_inference(client_for(b, default_spec()), b.server, transport);
    CHECK(ia.transcripts == ib.transcripts);
  }
}

TEST_CASE("client input never reaches the server") {
  World w = make_world(12);
  REQUIRE(run_certification(w.server, w.regulator).status == CertStatus::certified);
  const InferenceOutcome out = run_inference(client_for(w, default_spec()), w.server);
  REQUIRE(out.status == InferStatus::accepted);
  const Bytes x = encode_inference_input(w.query);
  for (const WireEvent& e : out.transcripts.at("server")) {
    if (e.outbound) continue;
    CHECK_FALSE(contains(e.frame, x));
    CHECK(type_of(e) != FrameType::infer_result);
  }
  bool dealer_saw_x = false;
  for (const WireEvent& e : out.transcripts.at("dealer"))
    if (!e.outbound && e.link == "client" && type_of(e) == FrameType::fsc_input) dealer_saw_x = contains(e.frame, x);
  CHECK(dealer_saw_x);
  CHECK(out.dealer.leakage == std::vector<LeakageEntry>{{Party::p2, "yhat", 2}, {Party::p2, "h", 32}});
}

TEST_CASE("completeness across seeds") {
  int accepted = 0;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    World w = make_world(seed);
    const CertificationOutcome c = run_certification(w.server, w.regulator);
    if (c.status != CertStatus::certified) {
      INFO("seed " << seed << " " << c.detail);
      CHECK(c.status == CertStatus::certified);
      continue;
    }
    const InferenceOutcome inf = run_inference(client_for(w, default_spec()), w.server);
    accepted += inf.status == InferStatus::accepted && inf.label == predict(w.server.model, w.query);
  }
  CHECK(accepted == 100);
}

TEST_CASE("endpoint parsing") {
  CHECK(parse_endpoint("7000") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 7000});
  CHECK(parse_endpoint("localhost:81") == std::pair<std::string, std::uint16_t>{"localhost", 81});
  CHECK_THROWS(parse_endpoint("host:99999"));
  CHECK_THROWS(parse_endpoint("host:"));
}

TEST_CASE("in-process channel times out and reports closed peers") {
  auto [a, b] = make_in_process_pair(std::chrono::milliseconds(50));
  CHECK_THROWS_WITH_AS(a->recv(), doctest::Contains("timed out"), Error);
  b->send(abort_frame());
  CHECK(a->recv().type == FrameType::abort);
  b.reset();
  CHECK_THROWS_WITH_AS(a->recv(), doctest::Contains("closed"), Error);
}

}

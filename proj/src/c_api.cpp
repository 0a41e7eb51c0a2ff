#include "faircert/faircert.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>

#include "faircert/augmentor.hpp"
#include "faircert/crypto.hpp"
#include "faircert/data.hpp"
#include "faircert/experiments.hpp"
#include "faircert/fairness.hpp"
#include "faircert/model.hpp"
#include "faircert/planted.hpp"
#include "faircert/prg.hpp"
#include "faircert/protocol.hpp"
#include "faircert/secure_compute.hpp"
#include "faircert/transport.hpp"

using namespace faircert;

struct fc_spec {
  FairnessSpec spec;
};
struct fc_augmentor {
  AugmentorConfig config;
};
struct fc_dataset {
  Dataset data;
};
struct fc_model {
  ModelSpec model;
};
struct fc_keypair {
  KeyPair keys;
};

namespace {

std::string leakage_text(const std::vector<LeakageEntry>& log) {
  std::ostringstream out;
  for (const LeakageEntry& e : log) out << party_name(e.party) << ' ' << e.datum << ' ' << e.length << '\n';
  return out.str();
}

std::map<std::string, std::string> transcript_texts(const std::map<std::string, std::vector<WireEvent>>& t) {
  std::map<std::string, std::string> out;
  for (const auto& [role, events] : t) out[role] = wire_log_text(events);
  return out;
}

}  // namespace

struct fc_cert_outcome {
  CertificationOutcome outcome;
  std::string status_name, digest_hex, leakage;
  std::map<std::string, std::string> transcripts;

  explicit fc_cert_outcome(CertificationOutcome o) : outcome(std::move(o)) {
    status_name = cert_status_name(outcome.status);
    if (outcome.digest) digest_hex = to_hex(outcome.digest->root);
    leakage = leakage_text(outcome.dealer.leakage);
    transcripts = transcript_texts(outcome.transcripts);
  }
};

struct fc_infer_outcome {
  InferenceOutcome outcome;
  std::string status_name, leakage;
  std::map<std::string, std::string> transcripts;

  explicit fc_infer_outcome(InferenceOutcome o) : outcome(std::move(o)) {
    status_name = infer_status_name(outcome.status);
    leakage = leakage_text(outcome.dealer.leakage);
    transcripts = transcript_texts(outcome.transcripts);
  }
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
fc_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return FC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<fc_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = std::string("INTERNAL: ") + e.what();
    return FC_INTERNAL;
  } catch (...) {
    g_last_error = "INTERNAL: unknown failure";
    return FC_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Micro micro_arg(const char* text, const char* what) {
  need(text, what);
  return Micro::parse(text);
}

/// Non-negative decimal to Q16.16, rounded to nearest.
Q16 q16_arg(const char* text, const char* what) {
  const Micro m = micro_arg(text, what);
  const std::uint64_t raw = (std::uint64_t{m.units} * 65536 + kMicroScale / 2) / kMicroScale;
  require(raw <= 0x7FFFFFFFu, ErrorCode::overflow, std::string(what) + " out of range");
  return Q16::from_raw(static_cast<std::int32_t>(raw));
}

std::vector<double> parse_taus(const char* text) {
  if (!text || !*text) return default_tau_grid();
  std::vector<double> taus;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "INF") {
      taus.push_back(kInfinity);
      continue;
    }
    taus.push_back(Micro::parse(item).to_double());
  }
  require(!taus.empty(), ErrorCode::invalid_argument, "empty tau grid");
  return taus;
}

std::vector<Micro> parse_micro_list(const char* text) {
  std::vector<Micro> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(Micro::parse(item));
  require(!out.empty(), ErrorCode::invalid_argument, "empty list");
  return out;
}

Sample sample_arg(const int32_t* features, uint32_t dimension, uint32_t group) {
  require(features != nullptr || dimension == 0, ErrorCode::invalid_argument, "features is null");
  Sample x;
  x.group = group;
  for (uint32_t i = 0; i < dimension; ++i) x.features.push_back(Q16::from_raw(features[i]));
  return x;
}

PublicKey vk_arg(const char* hex) {
  need(hex, "verification key");
  const Bytes raw = from_hex(hex);
  require(raw.size() == 32, ErrorCode::malformed_key, "verification key must be 32 bytes");
  PublicKey vk{};
  std::copy(raw.begin(), raw.end(), vk.begin());
  return vk;
}

std::optional<AugmentorConfig> augmentor_arg(const fc_augmentor* a) {
  if (!a) return std::nullopt;
  return a->config;
}

const char* find_text(const std::map<std::string, std::string>& m, const char* key) {
  static const char* const empty = "";
  if (!key) return empty;
  const auto it = m.find(key);
  return it == m.end() ? empty : it->second.c_str();
}

constexpr std::chrono::minutes kServeAcceptTimeout{10};

}  // namespace

extern "C" {

const char* fc_last_error(void) { return g_last_error.c_str(); }

const char* fc_status_name(fc_status status) {
  if (status == FC_OK) return "OK";
  if (status == FC_INTERNAL) return "INTERNAL";
  if (status >= FC_INVALID_ARGUMENT && status <= FC_OVERFLOW) return error_name(static_cast<ErrorCode>(status)).data();
  return "UNKNOWN";
}

const char* fc_version(void) { return "1.0.0"; }

void fc_string_free(char* text) { std::free(text); }

fc_status fc_min_samples(const char* threshold, const char* efg, const char* delta, uint32_t groups, uint32_t labels,
                         int efficiency_variant, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = min_samples(micro_arg(threshold, "threshold").to_rational(), micro_arg(efg, "efg").to_rational(),
                       micro_arg(delta, "delta").to_rational(), groups, labels,
                       efficiency_variant ? BoundVariant::efficiency : BoundVariant::union_bound);
  });
}

fc_status fc_tail_bound(uint64_t m, const char* half_width, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = static_cast<double>(tail_bound(m, micro_arg(half_width, "half_width").to_rational()));
  });
}

fc_status fc_estimate_gates(uint64_t model_bytes, uint64_t weight_bits, fc_gate_report* out) {
  return guarded([&] {
    need(out, "out");
    const GateCostReport r = estimate_gates(model_bytes, weight_bits);
    out->hash_and_per_bit = r.hash_and_gates_per_input_bit;
    out->merkle_and_per_bit = r.merkle_and_gates_per_input_bit;
    out->inference_and_per_weight_bit = r.inference_and_gates_per_weight_bit;
    out->merkle_total = r.merkle_total_and_gates;
    out->inference_total = r.total_inference_gates;
    out->has_overhead = r.overhead_ratio.has_value();
    out->overhead_ratio = r.overhead_ratio.value_or(0.0);
  });
}

fc_status fc_spec_new(const char* metric, const char* epsilon, const char* delta, const char* alpha, fc_spec** out) {
  return guarded([&] {
    need(out, "out");
    need(metric, "metric");
    std::optional<Micro> a;
    if (alpha) a = Micro::parse(alpha);
    *out = new fc_spec{FairnessSpec::make(parse_metric(metric), micro_arg(epsilon, "epsilon"), micro_arg(delta, "delta"), a)};
  });
}

fc_status fc_spec_describe(const fc_spec* spec, char** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    const FairnessSpec& s = spec->spec;
    std::string text = "metric=" + metric_name(s.metric) + "\nepsilon=" + s.epsilon.to_string() +
                       "\ndelta=" + s.delta.to_string() + "\n";
    if (s.alpha) text += "alpha=" + s.alpha->to_string() + "\n";
    text += "fairness=" + s.fairness_string + "\n";
    *out = dup_string(text);
  });
}

void fc_spec_free(fc_spec* spec) { delete spec; }

fc_status fc_augmentor_new(uint64_t master_seed, const char* noise_sigma, const char* mask_prob, const char* invoke_prob,
                           const char* degree, fc_augmentor** out) {
  return guarded([&] {
    need(out, "out");
    AugmentorConfig c;
    c.master_seed = master_seed;
    c.noise_sigma = noise_sigma ? q16_arg(noise_sigma, "noise_sigma") : Q16{};
    if (mask_prob) c.mask_prob = Micro::parse(mask_prob);
    if (invoke_prob) c.invoke_prob = Micro::parse(invoke_prob);
    if (degree) c.degree = Micro::parse(degree);
    c.validate();
    *out = new fc_augmentor{c};
  });
}

void fc_augmentor_free(fc_augmentor* augmentor) { delete augmentor; }

fc_status fc_dataset_load(const char* path, fc_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fc_dataset{decode_dataset(read_file(path))};
  });
}

fc_status fc_dataset_save(const fc_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "dataset");
    need(path, "path");
    write_file(path, encode_dataset(data->data));
  });
}

fc_status fc_dataset_info(const fc_dataset* data, uint32_t* dimension, uint32_t* groups, uint32_t* labels, uint64_t* count) {
  return guarded([&] {
    need(data, "dataset");
    if (dimension) *dimension = data->data.dimension;
    if (groups) *groups = data->data.num_groups;
    if (labels) *labels = data->data.num_labels;
    if (count) *count = data->data.samples.size();
  });
}

fc_status fc_dataset_sample(const fc_dataset* data, uint64_t index, int32_t* features, uint32_t dimension, uint32_t* group,
                            uint32_t* label) {
  return guarded([&] {
    need(data, "dataset");
    require(index < data->data.samples.size(), ErrorCode::id_out_of_range, "sample index");
    const Sample& s = data->data.samples[index];
    require(dimension >= s.features.size(), ErrorCode::dimension_mismatch, "feature buffer too small");
    need(features, "features");
    for (std::size_t i = 0; i < s.features.size(); ++i) features[i] = s.features[i].raw();
    if (group) *group = s.group;
    if (label) *label = s.label;
  });
}

fc_status fc_dataset_augment(const fc_dataset* data, const fc_augmentor* augmentor, fc_dataset** out) {
  return guarded([&] {
    need(data, "dataset");
    need(augmentor, "augmentor");
    need(out, "out");
    *out = new fc_dataset{augment_dataset(augmentor->config, data->data)};
  });
}

void fc_dataset_free(fc_dataset* data) { delete data; }

fc_status fc_planted_dataset(const char* config_json, uint64_t count, int per_group, uint64_t data_seed, fc_dataset** out) {
  return guarded([&] {
    need(config_json, "config");
    need(out, "out");
    const PlantedConfig cfg = parse_planted_config(config_json);
    *out = new fc_dataset{per_group ? draw_planted_per_group(cfg, count, data_seed) : draw_planted(cfg, count, data_seed)};
  });
}

fc_status fc_planted_model(const char* config_json, fc_model** out) {
  return guarded([&] {
    need(config_json, "config");
    need(out, "out");
    *out = new fc_model{planted_model(parse_planted_config(config_json))};
  });
}

fc_status fc_planted_gap(const char* config_json, const char* metric, char** out) {
  return guarded([&] {
    need(config_json, "config");
    need(metric, "metric");
    need(out, "out");
    const Rational gap = planted_gap(true_gaps(parse_planted_config(config_json)), parse_metric(metric));
    *out = dup_string(format_decimal(gap.to_long_double()));
  });
}

uint64_t fc_derive_seed(uint64_t seed, const char* name) { return derive_seed(seed, name ? name : ""); }

fc_status fc_model_load(const char* path, fc_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fc_model{deserialize_model(read_file(path))};
  });
}

fc_status fc_model_save(const fc_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    write_file(path, serialize_model(model->model));
  });
}

fc_status fc_model_info(const fc_model* model, uint32_t* dimension, uint32_t* labels, uint64_t* weight_count,
                        uint64_t* byte_count) {
  return guarded([&] {
    need(model, "model");
    if (dimension) *dimension = model->model.dimension();
    if (labels) *labels = model->model.num_labels();
    if (weight_count) *weight_count = model->model.weight_count();
    if (byte_count) *byte_count = serialize_model(model->model).size();
  });
}

fc_status fc_model_digest(const fc_model* model, char** hex_out) {
  return guarded([&] {
    need(model, "model");
    need(hex_out, "out");
    *hex_out = dup_string(to_hex(merkle_root(serialize_model(model->model)).root));
  });
}

fc_status fc_model_predict(const fc_model* model, const int32_t* features, uint32_t dimension, uint32_t group,
                           uint32_t* label_out) {
  return guarded([&] {
    need(model, "model");
    need(label_out, "out");
    *label_out = predict(model->model, sample_arg(features, dimension, group));
  });
}

fc_status fc_model_test(const fc_model* model, const fc_dataset* data, const fc_spec* spec, char** report_out) {
  return guarded([&] {
    need(model, "model");
    need(data, "dataset");
    need(spec, "spec");
    need(report_out, "out");
    const std::vector<LabelId> predictions = predict_all(model->model, data->data);
    *report_out = dup_string(to_text(decide(spec->spec, build_risk_table(data->data, predictions))));
  });
}

void fc_model_free(fc_model* model) { delete model; }

fc_status fc_keypair_generate(uint64_t seed, fc_keypair** out) {
  return guarded([&] {
    need(out, "out");
    CounterPrg prg(derive_seed(seed, "keys"));
    ByteWriter w;
    for (int i = 0; i < 4; ++i) w.u64(prg.next_u64());
    *out = new fc_keypair{keygen(std::move(w).take())};
  });
}

fc_status fc_keypair_load(const char* path, fc_keypair** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fc_keypair{decode_keypair(read_file(path))};
  });
}

fc_status fc_keypair_save(const fc_keypair* keys, const char* path) {
  return guarded([&] {
    need(keys, "keys");
    need(path, "path");
    write_file(path, encode_keypair(keys->keys));
  });
}

fc_status fc_keypair_public_hex(const fc_keypair* keys, char** out) {
  return guarded([&] {
    need(keys, "keys");
    need(out, "out");
    *out = dup_string(to_hex(keys->keys.verification_key));
  });
}

fc_status fc_keypair_id_hex(const fc_keypair* keys, char** out) {
  return guarded([&] {
    need(keys, "keys");
    need(out, "out");
    *out = dup_string(to_hex(key_id(keys->keys.verification_key)));
  });
}

void fc_keypair_free(fc_keypair* keys) { delete keys; }

fc_status fc_certify(const fc_model* model, const fc_dataset* test_set, const fc_keypair* keys, const fc_spec* spec,
                     const fc_augmentor* augmentor, fc_transport transport, fc_cert_outcome** out) {
  return guarded([&] {
    need(model, "model");
    need(test_set, "dataset");
    need(keys, "keys");
    need(spec, "spec");
    need(out, "out");
    ServerParty server{model->model, {}, {}, {}, {}};
    const RegulatorParty regulator{keys->keys, test_set->data, spec->spec, augmentor_arg(augmentor)};
    *out = new fc_cert_outcome(run_certification(
        server, regulator, transport == FC_TRANSPORT_TCP ? TransportKind::tcp : TransportKind::in_process));
  });
}

fc_status fc_certify_remote(const fc_dataset* test_set, const fc_keypair* keys, const fc_spec* spec,
                            const fc_augmentor* augmentor, const char* server_endpoint, const char* dealer_endpoint,
                            fc_cert_outcome** out) {
  return guarded([&] {
    need(test_set, "dataset");
    need(keys, "keys");
    need(spec, "spec");
    need(server_endpoint, "server endpoint");
    need(dealer_endpoint, "dealer endpoint");
    need(out, "out");
    const RegulatorParty regulator{keys->keys, test_set->data, spec->spec, augmentor_arg(augmentor)};
    const PrecheckResult pre = precheck(regulator.spec, regulator.test_set);
    if (!pre.ok) {
      CertificationOutcome o;
      o.status = CertStatus::precheck_failed;
      o.precheck = pre;
      o.detail = "test set needs " + std::to_string(pre.required) + " samples per cell";
      *out = new fc_cert_outcome(std::move(o));
      return;
    }
    const auto [sh, sp] = parse_endpoint(server_endpoint);
    const auto [dh, dp] = parse_endpoint(dealer_endpoint);
    auto server = TcpChannel::connect(sh, sp);
    auto dealer = TcpChannel::connect(dh, dp);
    auto log = std::make_shared<WireLog>();
    RecordingChannel to_server(*server, log, "server");
    RecordingChannel to_dealer(*dealer, log, "dealer");
    CertificationOutcome o = regulator_certify(regulator, to_server, to_dealer);
    o.transcripts["regulator"] = log->events();
    *out = new fc_cert_outcome(std::move(o));
  });
}

fc_cert_status fc_cert_outcome_status(const fc_cert_outcome* o) {
  return o ? static_cast<fc_cert_status>(o->outcome.status) : FC_CERT_PROTOCOL_ERROR;
}
const char* fc_cert_outcome_status_name(const fc_cert_outcome* o) { return o ? o->status_name.c_str() : ""; }
const char* fc_cert_outcome_detail(const fc_cert_outcome* o) { return o ? o->outcome.detail.c_str() : ""; }
uint64_t fc_cert_outcome_required(const fc_cert_outcome* o) { return o ? o->outcome.precheck.required : 0; }
const char* fc_cert_outcome_digest(const fc_cert_outcome* o) { return o ? o->digest_hex.c_str() : ""; }

fc_status fc_cert_outcome_save_certificate(const fc_cert_outcome* o, const char* path) {
  return guarded([&] {
    need(o, "outcome");
    need(path, "path");
    require(o->outcome.status == CertStatus::certified, ErrorCode::wrong_state, "no certificate was issued");
    write_file(path, o->outcome.certificate_file);
  });
}

const char* fc_cert_outcome_audit(const fc_cert_outcome* o) { return o ? o->outcome.dealer.audit.c_str() : ""; }
const char* fc_cert_outcome_leakage(const fc_cert_outcome* o) { return o ? o->leakage.c_str() : ""; }
const char* fc_cert_outcome_transcript(const fc_cert_outcome* o, const char* role) {
  return o ? find_text(o->transcripts, role) : "";
}
void fc_cert_outcome_free(fc_cert_outcome* o) { delete o; }

fc_status fc_infer(const char* regulator_vk_hex, const int32_t* features, uint32_t dimension, uint32_t group,
                   const fc_spec* requested, const fc_model* server_model, const char* certificate_path,
                   fc_transport transport, fc_infer_outcome** out) {
  return guarded([&] {
    need(requested, "spec");
    need(server_model, "model");
    need(out, "out");
    ServerParty server{server_model->model, {}, {}, {}, {}};
    if (certificate_path) server.certificate_file = read_file(certificate_path);
    const ClientParty client{vk_arg(regulator_vk_hex), sample_arg(features, dimension, group), requested->spec};
    *out = new fc_infer_outcome(
        run_inference(client, server, transport == FC_TRANSPORT_TCP ? TransportKind::tcp : TransportKind::in_process));
  });
}

fc_status fc_infer_remote(const char* regulator_vk_hex, const int32_t* features, uint32_t dimension, uint32_t group,
                          const fc_spec* requested, const char* server_endpoint, const char* dealer_endpoint,
                          fc_infer_outcome** out) {
  return guarded([&] {
    need(requested, "spec");
    need(server_endpoint, "server endpoint");
    need(dealer_endpoint, "dealer endpoint");
    need(out, "out");
    const ClientParty client{vk_arg(regulator_vk_hex), sample_arg(features, dimension, group), requested->spec};
    const auto [sh, sp] = parse_endpoint(server_endpoint);
    const auto [dh, dp] = parse_endpoint(dealer_endpoint);
    auto server = TcpChannel::connect(sh, sp);
    auto dealer = TcpChannel::connect(dh, dp);
    auto log = std::make_shared<WireLog>();
    RecordingChannel to_server(*server, log, "server");
    RecordingChannel to_dealer(*dealer, log, "dealer");
    InferenceOutcome o = client_infer(client, to_server, to_dealer);
    o.transcripts["client"] = log->events();
    *out = new fc_infer_outcome(std::move(o));
  });
}

fc_infer_status fc_infer_outcome_status(const fc_infer_outcome* o) {
  return o ? static_cast<fc_infer_status>(o->outcome.status) : FC_INFER_PROTOCOL_ERROR;
}
const char* fc_infer_outcome_status_name(const fc_infer_outcome* o) { return o ? o->status_name.c_str() : ""; }
const char* fc_infer_outcome_detail(const fc_infer_outcome* o) { return o ? o->outcome.detail.c_str() : ""; }

fc_status fc_infer_outcome_label(const fc_infer_outcome* o, uint32_t* label) {
  return guarded([&] {
    need(o, "outcome");
    need(label, "out");
    require(o->outcome.label.has_value(), ErrorCode::wrong_state, "prediction was not accepted");
    *label = *o->outcome.label;
  });
}

const char* fc_infer_outcome_audit(const fc_infer_outcome* o) { return o ? o->outcome.dealer.audit.c_str() : ""; }
const char* fc_infer_outcome_leakage(const fc_infer_outcome* o) { return o ? o->leakage.c_str() : ""; }
const char* fc_infer_outcome_transcript(const fc_infer_outcome* o, const char* role) {
  return o ? find_text(o->transcripts, role) : "";
}
void fc_infer_outcome_free(fc_infer_outcome* o) { delete o; }

fc_status fc_run_dealer(const char* listen_endpoint, uint32_t sessions, int announce) {
  return guarded([&] {
    need(listen_endpoint, "listen endpoint");
    const auto [host, port] = parse_endpoint(listen_endpoint);
    TcpListener listener(host, port);
    if (announce) {
      std::printf("listening %u\n", static_cast<unsigned>(listener.port()));
      std::fflush(stdout);
    }
    for (uint32_t i = 0; i < sessions; ++i) {
      auto a = listener.accept(kServeAcceptTimeout);
      auto b = listener.accept(kServeAcceptTimeout);
      const DealerRecord rec = dealer_session(*a, *b);
      if (announce) {
        std::printf("session %u state=%s%s%s\n%s%s", i, state_name(rec.final_state).c_str(),
                    rec.detail.empty() ? "" : " error=", rec.detail.c_str(), rec.audit.c_str(),
                    leakage_text(rec.leakage).c_str());
        std::fflush(stdout);
      }
    }
  });
}

fc_status fc_run_server(const char* listen_endpoint, const char* dealer_endpoint, const fc_model* model,
                        const char* certificate_in, const char* certificate_out, uint32_t sessions, int announce) {
  return guarded([&] {
    need(listen_endpoint, "listen endpoint");
    need(dealer_endpoint, "dealer endpoint");
    need(model, "model");
    ServerParty server{model->model, {}, {}, {}, {}};
    if (certificate_in && std::filesystem::exists(certificate_in)) server.certificate_file = read_file(certificate_in);
    const auto [host, port] = parse_endpoint(listen_endpoint);
    const auto [dh, dp] = parse_endpoint(dealer_endpoint);
    TcpListener listener(host, port);
    if (announce) {
      std::printf("listening %u\n", static_cast<unsigned>(listener.port()));
      std::fflush(stdout);
    }
    for (uint32_t i = 0; i < sessions; ++i) {
      auto peer = listener.accept(kServeAcceptTimeout);
      auto dealer = TcpChannel::connect(dh, dp);
      const ServerSessionResult r = server_session(server, *peer, *dealer);
      if (r.status == ServerStatus::certified && certificate_out) write_file(certificate_out, *server.certificate_file);
      if (announce) {
        static const char* const names[] = {"certified", "not_fair", "served", "aborted", "protocol_error"};
        std::printf("session %u %s%s%s\n", i, names[static_cast<int>(r.status)], r.detail.empty() ? "" : " ",
                    r.detail.c_str());
        std::fflush(stdout);
      }
    }
  });
}

fc_status fc_experiment_coverage(const char* plant_json, const fc_spec* spec, const fc_augmentor* augmentor,
                                 uint32_t trials, uint64_t per_group, int efficiency_variant, uint32_t threads,
                                 char** csv_out) {
  return guarded([&] {
    need(plant_json, "config");
    need(spec, "spec");
    need(csv_out, "out");
    CoverageConfig cfg;
    cfg.plant = parse_planted_config(plant_json);
    cfg.spec = spec->spec;
    cfg.trials = trials;
    if (per_group) cfg.per_group = per_group;
    cfg.variant = efficiency_variant ? BoundVariant::efficiency : BoundVariant::union_bound;
    cfg.augmentor = augmentor_arg(augmentor);
    cfg.threads = threads;
    *csv_out = dup_string(coverage_csv(run_coverage(cfg)));
  });
}

fc_status fc_attack_knn(uint64_t seed, uint32_t per_group, uint32_t fresh, const char* taus, char** csv_out,
                        int* attack_succeeded) {
  return guarded([&] {
    need(csv_out, "out");
    KnnFixtureConfig cfg;
    cfg.seed = seed;
    if (per_group) cfg.per_group = per_group;
    if (fresh) cfg.fresh = fresh;
    cfg.taus = parse_taus(taus);
    const KnnAttackResult r = run_knn_attack(knn_fixture(cfg));
    *csv_out = dup_string(knn_csv(r));
    if (attack_succeeded) *attack_succeeded = attack_succeeds(r);
  });
}

fc_status fc_attack_knn_custom(const fc_model* fair, const fc_model* unfair, const fc_dataset* reference,
                               const fc_dataset* test, const fc_dataset* fresh, const char* metric, const char* taus,
                               char** csv_out, int* attack_succeeded) {
  return guarded([&] {
    need(fair, "fair model");
    need(unfair, "unfair model");
    need(reference, "reference set");
    need(test, "test set");
    need(fresh, "fresh set");
    need(csv_out, "out");
    const KnnAttackSetup setup{fair->model,  unfair->model, reference->data, test->data, fresh->data,
                               metric ? parse_metric(metric) : FairnessMetric::ore, parse_taus(taus)};
    const KnnAttackResult r = run_knn_attack(setup);
    *csv_out = dup_string(knn_csv(r));
    if (attack_succeeded) *attack_succeeded = attack_succeeds(r);
  });
}

fc_status fc_augment_sweep(uint64_t seed, uint32_t per_group, const char* noise_sigma, const char* mask_prob,
                           const char* degrees, char** csv_out) {
  return guarded([&] {
    need(csv_out, "out");
    AugmentSweepConfig cfg;
    cfg.seed = seed;
    if (per_group) cfg.per_group = per_group;
    if (noise_sigma) cfg.noise_sigma = q16_arg(noise_sigma, "noise_sigma");
    if (mask_prob) cfg.mask_prob = Micro::parse(mask_prob);
    if (degrees) cfg.degrees = parse_micro_list(degrees);
    *csv_out = dup_string(augment_sweep_csv(run_augment_sweep(cfg)));
  });
}

}  // extern "C"

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faircert/faircert.h"
#include "json.hpp"

namespace {

enum Exit { kOk = 0, kInternal = 1, kReject = 2, kPrecondition = 3, kAbort = 4 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(fc_status s) {
  switch (s) {
    case FC_OK: return kOk;
    case FC_PROTOCOL_ERROR:
    case FC_FSC_ABORT: return kAbort;
    case FC_NOT_FAIR:
    case FC_SIG_INVALID:
    case FC_SPEC_MISMATCH: return kReject;
    case FC_INTERNAL: return kInternal;
    default: return kPrecondition;
  }
}

void check(fc_status s) {
  if (s != FC_OK) throw Failure{exit_for(s), fc_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Spec = Handle<fc_spec, fc_spec_free>;
using Augmentor = Handle<fc_augmentor, fc_augmentor_free>;
using Dataset = Handle<fc_dataset, fc_dataset_free>;
using Model = Handle<fc_model, fc_model_free>;
using Keys = Handle<fc_keypair, fc_keypair_free>;
using CertOutcome = Handle<fc_cert_outcome, fc_cert_outcome_free>;
using InferOutcome = Handle<fc_infer_outcome, fc_infer_outcome_free>;

std::string take(char* s) {
  std::string out(s ? s : "");
  fc_string_free(s);
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kPrecondition, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kPrecondition, "cannot write " + out_path};
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t g_seed = 0;

struct SpecFlags {
  std::string metric = "ore";
  std::string eps = "0.1";
  std::string delta = "0.05";
  std::string alpha;
  std::string mode = "private";

  void add(CLI::App* app) {
    app->add_option("--metric", metric, "ore, eo or dp")->check(CLI::IsMember({"ore", "eo", "dp"}, CLI::ignore_case));
    app->add_option("--eps", eps, "fairness threshold epsilon");
    app->add_option("--delta", delta, "failure probability delta");
    app->add_option("--alpha", alpha, "augmented-mode gap threshold");
    app->add_option("--mode", mode, "private or augmented")->check(CLI::IsMember({"private", "augmented"}));
  }

  bool augmented() const { return mode == "augmented"; }

  Spec build() const {
    if (augmented() && alpha.empty()) throw Failure{kPrecondition, "--mode augmented needs --alpha"};
    if (!augmented() && !alpha.empty()) throw Failure{kPrecondition, "--alpha is only meaningful with --mode augmented"};
    fc_spec* s = nullptr;
    check(fc_spec_new(metric.c_str(), eps.c_str(), delta.c_str(), augmented() ? alpha.c_str() : nullptr, &s));
    return Spec(s);
  }
};

struct AugmentFlags {
  std::string sigma = "0.1";
  std::string mask = "0";
  std::string invoke = "1";
  std::string degree = "1";

  void add(CLI::App* app) {
    app->add_option("--sigma", sigma, "augmentor noise standard deviation");
    app->add_option("--mask", mask, "augmentor coordinate masking probability");
    app->add_option("--invoke", invoke, "augmentor per-stage invocation probability");
    app->add_option("--degree", degree, "augmentation degree");
  }

  Augmentor build(std::uint64_t seed) const {
    fc_augmentor* a = nullptr;
    check(fc_augmentor_new(seed, sigma.c_str(), mask.c_str(), invoke.c_str(), degree.c_str(), &a));
    return Augmentor(a);
  }
};

struct PlantFlags {
  std::string config;
  std::uint32_t groups = 2;
  std::uint32_t labels = 2;
  std::uint32_t dimension = 4;
  std::string rates = "0.2,0.2";

  void add(CLI::App* app) {
    app->add_option("--config", config, "planted config JSON file");
    app->add_option("--groups", groups, "number of groups");
    app->add_option("--labels", labels, "number of labels");
    app->add_option("--dim", dimension, "feature dimension");
    app->add_option("--rates", rates, "per-group error rates, comma separated");
  }

  /// JSON text for the C API; the global seed wins unless only the file gives one.
  std::string json(bool seed_given) const {
    nlohmann::json j;
    if (!config.empty()) {
      try {
        j = nlohmann::json::parse(read_text(config));
      } catch (const nlohmann::json::exception& e) {
        throw Failure{kPrecondition, std::string("config: ") + e.what()};
      }
      if (seed_given || !j.contains("seed")) j["seed"] = g_seed;
      return j.dump();
    }
    j["dimension"] = dimension;
    j["groups"] = groups;
    j["labels"] = labels;
    j["weights"] = "uniform";
    j["error_rates"] = split(rates);
    j["seed"] = g_seed;
    return j.dump();
  }
};

std::vector<std::int32_t> parse_features(const std::string& text) {
  std::vector<std::int32_t> raw;
  for (const std::string& item : split(text)) {
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(value) || std::fabs(value) >= 32768.0)
      throw Failure{kPrecondition, "bad feature value '" + item + "'"};
    raw.push_back(static_cast<std::int32_t>(std::nearbyint(value * 65536.0)));
  }
  return raw;
}

Model load_model(const std::string& path) {
  fc_model* m = nullptr;
  check(fc_model_load(path.c_str(), &m));
  return Model(m);
}

Dataset load_dataset(const std::string& path) {
  fc_dataset* d = nullptr;
  check(fc_dataset_load(path.c_str(), &d));
  return Dataset(d);
}

Keys load_keys(const std::string& path) {
  fc_keypair* k = nullptr;
  check(fc_keypair_load(path.c_str(), &k));
  return Keys(k);
}

int cert_exit(fc_cert_status s) {
  switch (s) {
    case FC_CERT_CERTIFIED: return kOk;
    case FC_CERT_NOT_FAIR: return kReject;
    case FC_CERT_PRECHECK_FAILED: return kPrecondition;
    default: return kAbort;
  }
}

int infer_exit(fc_infer_status s) {
  switch (s) {
    case FC_INFER_ACCEPTED: return kOk;
    case FC_INFER_SIG_INVALID:
    case FC_INFER_SPEC_MISMATCH:
    case FC_INFER_NO_CERTIFICATE: return kReject;
    default: return kAbort;
  }
}

fc_transport transport_of(const std::string& name) { return name == "tcp" ? FC_TRANSPORT_TCP : FC_TRANSPORT_IN_PROCESS; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faircert: fairness certification and certified inference"};
  app.require_subcommand(1);
  app.fallthrough();
  auto* seed_opt = app.add_option("--seed", g_seed, "master seed for every random choice")->envname("FAIRCERT_SEED");

  // bound
  auto* bound = app.add_subcommand("bound", "minimum per-group sample count");
  std::string b_eps = "0.1", b_efg = "0", b_delta = "0.05", b_variant = "union";
  std::uint32_t b_groups = 2, b_labels = 2;
  bound->add_option("--eps", b_eps, "threshold (epsilon, or alpha in augmented mode)");
  bound->add_option("--efg", b_efg, "empirical fairness gap");
  bound->add_option("--delta", b_delta, "failure probability");
  bound->add_option("--groups", b_groups, "number of groups");
  bound->add_option("--labels", b_labels, "number of labels");
  bound->add_option("--variant", b_variant, "union or efficiency")->check(CLI::IsMember({"union", "efficiency"}));

  // estimate-gates
  auto* gates = app.add_subcommand("estimate-gates", "AND-gate cost of hashing and inference");
  gates->alias("gates");
  std::uint64_t g_bytes = 0, g_bits = 0;
  std::string g_model;
  gates->add_option("--model-bytes", g_bytes, "serialized model size in bytes");
  gates->add_option("--weight-bits", g_bits, "weight bits evaluated in inference");
  gates->add_option("--model", g_model, "model file; sets both sizes (32 bits per weight)");

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "draw a synthetic test set from a planted config");
  PlantFlags d_plant;
  std::uint64_t d_count = 1000;
  bool d_per_group = false;
  std::string d_out;
  d_plant.add(gen_data);
  gen_data->add_option("--count", d_count, "number of samples (per group with --per-group)");
  gen_data->add_flag("--per-group", d_per_group, "draw exactly --count samples for every group");
  gen_data->add_option("--out", d_out, "dataset file")->required();

  // gen-model
  auto* gen_model = app.add_subcommand("gen-model", "write the planted model for a config");
  PlantFlags m_plant;
  std::string m_out;
  m_plant.add(gen_model);
  gen_model->add_option("--out", m_out, "model file")->required();

  // keygen
  auto* keygen = app.add_subcommand("keygen", "regulator signing keys");
  std::string k_out, k_vk_out;
  keygen->add_option("--out", k_out, "key pair file")->required();
  keygen->add_option("--vk-out", k_vk_out, "also write the verification key as hex");

  // certify
  auto* certify = app.add_subcommand("certify", "regulator: certify a model (runs all roles unless --connect is given)");
  SpecFlags c_spec;
  AugmentFlags c_aug;
  std::string c_model, c_data, c_keys, c_out, c_transport = "inproc", c_connect, c_dealer;
  bool c_audit = false;
  c_spec.add(certify);
  c_aug.add(certify);
  certify->add_option("--model", c_model, "server model file (in-process runs)");
  certify->add_option("--data", c_data, "test set file")->required();
  certify->add_option("--keys", c_keys, "regulator key pair file")->required();
  certify->add_option("--out", c_out, "certificate file to write on success");
  certify->add_option("--transport", c_transport, "inproc or tcp (loopback)")->check(CLI::IsMember({"inproc", "tcp"}));
  certify->add_option("--connect", c_connect, "server host:port");
  certify->add_option("--dealer", c_dealer, "dealer host:port");
  certify->add_flag("--audit", c_audit, "print the F_SC transcript and delivery log");

  // infer
  auto* infer = app.add_subcommand("infer", "client: certified prediction for one input");
  SpecFlags i_spec;
  std::string i_vk, i_keys, i_features, i_model, i_cert, i_transport = "inproc", i_connect, i_dealer;
  std::uint32_t i_group = 0;
  bool i_audit = false;
  i_spec.add(infer);
  infer->add_option("--vk", i_vk, "regulator verification key (hex)");
  infer->add_option("--keys", i_keys, "take the verification key from a key pair file");
  infer->add_option("--features", i_features, "comma separated decimals")->required();
  infer->add_option("--group", i_group, "group id");
  infer->add_option("--model", i_model, "server model file (in-process runs)");
  infer->add_option("--cert", i_cert, "server certificate file (in-process runs)");
  infer->add_option("--transport", i_transport, "inproc or tcp (loopback)")->check(CLI::IsMember({"inproc", "tcp"}));
  infer->add_option("--connect", i_connect, "server host:port");
  infer->add_option("--dealer", i_dealer, "dealer host:port");
  infer->add_flag("--audit", i_audit, "print the F_SC transcript and delivery log");

  // dealer
  auto* dealer = app.add_subcommand("dealer", "trusted-dealer F_SC endpoint");
  std::string dl_listen = "127.0.0.1:0";
  std::uint32_t dl_sessions = 1;
  dealer->add_option("--listen", dl_listen, "host:port");
  dealer->add_option("--sessions", dl_sessions, "sessions to serve before exiting");

  // serve
  auto* serve = app.add_subcommand("serve", "server role over TCP");
  std::string s_listen = "127.0.0.1:0", s_dealer, s_model, s_cert, s_cert_out;
  std::uint32_t s_sessions = 1;
  serve->add_option("--listen", s_listen, "host:port");
  serve->add_option("--dealer", s_dealer, "dealer host:port")->required();
  serve->add_option("--model", s_model, "model file")->required();
  serve->add_option("--cert", s_cert, "certificate to present to clients");
  serve->add_option("--cert-out", s_cert_out, "where to store a newly issued certificate");
  serve->add_option("--sessions", s_sessions, "sessions to serve before exiting");

  // experiment-coverage
  auto* coverage = app.add_subcommand("experiment-coverage", "repeated planted draw-and-test trials (CSV)");
  PlantFlags e_plant;
  SpecFlags e_spec;
  AugmentFlags e_aug;
  std::uint32_t e_trials = 100, e_threads = 0;
  std::uint64_t e_per_group = 0;
  std::string e_variant = "union", e_out;
  e_plant.add(coverage);
  e_spec.add(coverage);
  e_aug.add(coverage);
  coverage->add_option("--trials", e_trials, "number of trials")->check(CLI::PositiveNumber);
  coverage->add_option("--per-group", e_per_group, "samples per group (default: bound at EFG = threshold/2; EO needs roughly |Y| times more)");
  coverage->add_option("--variant", e_variant, "union or efficiency")->check(CLI::IsMember({"union", "efficiency"}));
  coverage->add_option("--threads", e_threads, "worker threads (0 = all cores)");
  coverage->add_option("--out", e_out, "CSV file (default stdout)");

  // attack-knn
  auto* attack = app.add_subcommand("attack-knn", "1-NN routing attack sweep (CSV)");
  std::uint32_t a_per_group = 1000, a_fresh = 2000;
  std::string a_taus, a_out, a_fair, a_unfair, a_reference, a_test, a_fresh_data, a_metric = "ore";
  attack->add_option("--per-group", a_per_group, "public test samples per group");
  attack->add_option("--fresh", a_fresh, "fresh samples after certification");
  attack->add_option("--taus", a_taus, "comma separated thresholds, inf allowed");
  attack->add_option("--fair-model", a_fair, "custom fair model file");
  attack->add_option("--unfair-model", a_unfair, "custom unfair model file");
  attack->add_option("--reference", a_reference, "custom reference set (attacker's augmented copy)");
  attack->add_option("--test", a_test, "custom regulator test set");
  attack->add_option("--fresh-data", a_fresh_data, "custom fresh set");
  attack->add_option("--metric", a_metric, "ore, eo or dp");
  attack->add_option("--out", a_out, "CSV file (default stdout)");

  // augment-sweep
  auto* sweep = app.add_subcommand("augment-sweep", "accuracy and EFG by augmentation degree (CSV)");
  std::uint32_t w_per_group = 2000;
  std::string w_sigma = "1", w_mask = "0.25", w_degrees, w_out;
  sweep->add_option("--per-group", w_per_group, "samples per group");
  sweep->add_option("--sigma", w_sigma, "noise standard deviation");
  sweep->add_option("--mask", w_mask, "masking probability");
  sweep->add_option("--degrees", w_degrees, "comma separated degrees");
  sweep->add_option("--out", w_out, "CSV file (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "run certification (and optionally one inference) and print the F_SC leakage transcript");
  SpecFlags u_spec;
  AugmentFlags u_aug;
  std::string u_model, u_data, u_keys, u_features;
  std::uint32_t u_group = 0;
  u_spec.add(audit);
  u_aug.add(audit);
  audit->add_option("--model", u_model, "server model file")->required();
  audit->add_option("--data", u_data, "test set file")->required();
  audit->add_option("--keys", u_keys, "regulator key pair file")->required();
  audit->add_option("--features", u_features, "also run one inference on these features");
  audit->add_option("--group", u_group, "group id for the inference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kPrecondition;
  }
  const bool seed_given = seed_opt->count() > 0 || std::getenv("FAIRCERT_SEED") != nullptr;

  try {
    if (bound->parsed()) {
      std::uint64_t m = 0;
      check(fc_min_samples(b_eps.c_str(), b_efg.c_str(), b_delta.c_str(), b_groups, b_labels, b_variant == "efficiency", &m));
      std::cout << m << '\n';

    } else if (gates->parsed()) {
      if (!g_model.empty()) {
        Model m = load_model(g_model);
        std::uint64_t weights = 0;
        check(fc_model_info(m.get(), nullptr, nullptr, &weights, &g_bytes));
        g_bits = weights * 32;
      }
      fc_gate_report r{};
      check(fc_estimate_gates(g_bytes, g_bits, &r));
      std::printf("hash_and_gates_per_bit=%g\nmerkle_and_gates_per_bit=%g\ninference_and_gates_per_weight_bit=%g\n",
                  r.hash_and_per_bit, r.merkle_and_per_bit, r.inference_and_per_weight_bit);
      std::printf("merkle_total=%llu\ninference_total=%llu\n", static_cast<unsigned long long>(r.merkle_total),
                  static_cast<unsigned long long>(r.inference_total));
      if (r.has_overhead) std::printf("overhead_ratio=%.6f\n", r.overhead_ratio);
      else std::printf("overhead_ratio=undefined\n");

    } else if (gen_data->parsed()) {
      const std::string json = d_plant.json(seed_given);
      fc_dataset* d = nullptr;
      check(fc_planted_dataset(json.c_str(), d_count, d_per_group, fc_derive_seed(g_seed, "data"), &d));
      Dataset data(d);
      check(fc_dataset_save(data.get(), d_out.c_str()));
      std::uint64_t n = 0;
      check(fc_dataset_info(data.get(), nullptr, nullptr, nullptr, &n));
      std::cout << "samples=" << n << '\n';

    } else if (gen_model->parsed()) {
      const std::string json = m_plant.json(seed_given);
      fc_model* m = nullptr;
      check(fc_planted_model(json.c_str(), &m));
      Model model(m);
      check(fc_model_save(model.get(), m_out.c_str()));
      char* digest = nullptr;
      check(fc_model_digest(model.get(), &digest));
      std::cout << "digest=" << take(digest) << '\n';
      for (const char* metric : {"ore", "eo", "dp"}) {
        char* gap = nullptr;
        check(fc_planted_gap(json.c_str(), metric, &gap));
        std::cout << "true_gap_" << metric << '=' << take(gap) << '\n';
      }

    } else if (keygen->parsed()) {
      fc_keypair* k = nullptr;
      check(fc_keypair_generate(g_seed, &k));
      Keys keys(k);
      check(fc_keypair_save(keys.get(), k_out.c_str()));
      char* vk = nullptr;
      char* id = nullptr;
      check(fc_keypair_public_hex(keys.get(), &vk));
      check(fc_keypair_id_hex(keys.get(), &id));
      const std::string vk_hex = take(vk);
      std::cout << "vk=" << vk_hex << "\nkey_id=" << take(id) << '\n';
      if (!k_vk_out.empty()) emit(vk_hex + "\n", k_vk_out);

    } else if (certify->parsed() || audit->parsed()) {
      const bool is_audit = audit->parsed();
      const SpecFlags& sf = is_audit ? u_spec : c_spec;
      Spec spec = sf.build();
      Augmentor aug = sf.augmented() ? (is_audit ? u_aug : c_aug).build(fc_derive_seed(g_seed, "augmentor")) : Augmentor();
      Dataset data = load_dataset(is_audit ? u_data : c_data);
      Keys keys = load_keys(is_audit ? u_keys : c_keys);
      fc_cert_outcome* o = nullptr;
      if (!is_audit && !c_connect.empty()) {
        if (c_dealer.empty()) throw Failure{kPrecondition, "--connect needs --dealer"};
        check(fc_certify_remote(data.get(), keys.get(), spec.get(), aug.get(), c_connect.c_str(), c_dealer.c_str(), &o));
      } else {
        const std::string& model_path = is_audit ? u_model : c_model;
        if (model_path.empty()) throw Failure{kPrecondition, "--model is required without --connect"};
        Model model = load_model(model_path);
        check(fc_certify(model.get(), data.get(), keys.get(), spec.get(), aug.get(),
                         is_audit ? FC_TRANSPORT_IN_PROCESS : transport_of(c_transport), &o));
      }
      CertOutcome outcome(o);
      const fc_cert_status status = fc_cert_outcome_status(outcome.get());
      std::cout << "status=" << fc_cert_outcome_status_name(outcome.get()) << '\n';
      std::cout << "required_per_cell=" << fc_cert_outcome_required(outcome.get()) << '\n';
      if (*fc_cert_outcome_digest(outcome.get())) std::cout << "digest=" << fc_cert_outcome_digest(outcome.get()) << '\n';
      if (*fc_cert_outcome_detail(outcome.get())) std::cout << "detail=" << fc_cert_outcome_detail(outcome.get()) << '\n';
      if (status == FC_CERT_CERTIFIED && !is_audit && !c_out.empty())
        check(fc_cert_outcome_save_certificate(outcome.get(), c_out.c_str()));
      if (is_audit || c_audit) {
        std::cout << "# fsc transcript\n" << fc_cert_outcome_audit(outcome.get());
        std::cout << "# deliveries\n" << fc_cert_outcome_leakage(outcome.get());
      }
      if (is_audit && !u_features.empty() && status == FC_CERT_CERTIFIED) {
        const std::string cert_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                      "/faircert-audit-" + std::to_string(::getpid()) + ".cert";
        check(fc_cert_outcome_save_certificate(outcome.get(), cert_path.c_str()));
        char* vk = nullptr;
        check(fc_keypair_public_hex(keys.get(), &vk));
        const std::string vk_hex = take(vk);
        const std::vector<std::int32_t> x = parse_features(u_features);
        Model model = load_model(u_model);
        fc_infer_outcome* io = nullptr;
        const fc_status st = fc_infer(vk_hex.c_str(), x.data(), static_cast<std::uint32_t>(x.size()), u_group, spec.get(),
                                      model.get(), cert_path.c_str(), FC_TRANSPORT_IN_PROCESS, &io);
        std::remove(cert_path.c_str());
        check(st);
        InferOutcome inf(io);
        std::cout << "# inference status=" << fc_infer_outcome_status_name(inf.get()) << '\n';
        std::cout << "# fsc transcript\n" << fc_infer_outcome_audit(inf.get());
        std::cout << "# deliveries\n" << fc_infer_outcome_leakage(inf.get());
      }
      return cert_exit(status);

    } else if (infer->parsed()) {
      Spec spec = i_spec.build();
      std::string vk = i_vk;
      if (vk.empty() && !i_keys.empty()) {
        Keys keys = load_keys(i_keys);
        char* hex = nullptr;
        check(fc_keypair_public_hex(keys.get(), &hex));
        vk = take(hex);
      }
      if (vk.empty()) throw Failure{kPrecondition, "need --vk or --keys"};
      const std::vector<std::int32_t> x = parse_features(i_features);
      fc_infer_outcome* o = nullptr;
      if (!i_connect.empty()) {
        if (i_dealer.empty()) throw Failure{kPrecondition, "--connect needs --dealer"};
        check(fc_infer_remote(vk.c_str(), x.data(), static_cast<std::uint32_t>(x.size()), i_group, spec.get(),
                              i_connect.c_str(), i_dealer.c_str(), &o));
      } else {
        if (i_model.empty()) throw Failure{kPrecondition, "--model is required without --connect"};
        Model model = load_model(i_model);
        check(fc_infer(vk.c_str(), x.data(), static_cast<std::uint32_t>(x.size()), i_group, spec.get(), model.get(),
                       i_cert.empty() ? nullptr : i_cert.c_str(), transport_of(i_transport), &o));
      }
      InferOutcome outcome(o);
      const fc_infer_status status = fc_infer_outcome_status(outcome.get());
      std::cout << "status=" << fc_infer_outcome_status_name(outcome.get()) << '\n';
      std::uint32_t label = 0;
      if (status == FC_INFER_ACCEPTED && fc_infer_outcome_label(outcome.get(), &label) == FC_OK)
        std::cout << "label=" << label << '\n';
      if (*fc_infer_outcome_detail(outcome.get())) std::cout << "detail=" << fc_infer_outcome_detail(outcome.get()) << '\n';
      if (i_audit) {
        std::cout << "# fsc transcript\n" << fc_infer_outcome_audit(outcome.get());
        std::cout << "# deliveries\n" << fc_infer_outcome_leakage(outcome.get());
      }
      return infer_exit(status);

    } else if (dealer->parsed()) {
      check(fc_run_dealer(dl_listen.c_str(), dl_sessions, 1));

    } else if (serve->parsed()) {
      Model model = load_model(s_model);
      check(fc_run_server(s_listen.c_str(), s_dealer.c_str(), model.get(), s_cert.empty() ? nullptr : s_cert.c_str(),
                          s_cert_out.empty() ? nullptr : s_cert_out.c_str(), s_sessions, 1));

    } else if (coverage->parsed()) {
      const std::string json = e_plant.json(seed_given);
      Spec spec = e_spec.build();
      Augmentor aug = e_spec.augmented() ? e_aug.build(fc_derive_seed(g_seed, "augmentor")) : Augmentor();
      char* csv = nullptr;
      check(fc_experiment_coverage(json.c_str(), spec.get(), aug.get(), e_trials, e_per_group, e_variant == "efficiency",
                                   e_threads, &csv));
      emit(take(csv), e_out);

    } else if (attack->parsed()) {
      char* csv = nullptr;
      int succeeded = 0;
      const char* taus = a_taus.empty() ? nullptr : a_taus.c_str();
      if (!a_fair.empty() || !a_unfair.empty()) {
        if (a_fair.empty() || a_unfair.empty() || a_reference.empty() || a_test.empty() || a_fresh_data.empty())
          throw Failure{kPrecondition, "custom attack needs --fair-model --unfair-model --reference --test --fresh-data"};
        Model fair = load_model(a_fair), unfair = load_model(a_unfair);
        Dataset reference = load_dataset(a_reference), test = load_dataset(a_test), fresh = load_dataset(a_fresh_data);
        check(fc_attack_knn_custom(fair.get(), unfair.get(), reference.get(), test.get(), fresh.get(), a_metric.c_str(),
                                   taus, &csv, &succeeded));
      } else {
        check(fc_attack_knn(g_seed, a_per_group, a_fresh, taus, &csv, &succeeded));
      }
      emit(take(csv), a_out);
      std::cerr << "attack_succeeded=" << succeeded << '\n';

    } else if (sweep->parsed()) {
      char* csv = nullptr;
      check(fc_augment_sweep(g_seed, w_per_group, w_sigma.c_str(), w_mask.c_str(),
                             w_degrees.empty() ? nullptr : w_degrees.c_str(), &csv));
      emit(take(csv), w_out);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return kOk;
}

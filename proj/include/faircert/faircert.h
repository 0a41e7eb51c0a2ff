#ifndef FAIRCERT_FAIRCERT_H
#define FAIRCERT_FAIRCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(FAIRCERT_BUILDING_DLL)
#define FAIRCERT_API __attribute__((visibility("default")))
#else
#define FAIRCERT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Nonzero values other than FC_INTERNAL mirror the library's error kinds. */
typedef enum fc_status {
  FC_OK = 0,
  FC_INVALID_ARGUMENT = 1,
  FC_LENGTH_MISMATCH = 2,
  FC_ID_OUT_OF_RANGE = 3,
  FC_EMPTY_CELL = 4,
  FC_GAP_NOT_BELOW_THRESHOLD = 5,
  FC_DIMENSION_MISMATCH = 6,
  FC_INVALID_WEIGHTS = 7,
  FC_EMPTY_INPUT = 8,
  FC_MALFORMED_KEY = 9,
  FC_MALFORMED_MODEL = 10,
  FC_WRONG_STATE = 11,
  FC_CIRCUIT_MISMATCH = 12,
  FC_SIZE_MISMATCH = 13,
  FC_PRECHECK_FAILED = 14,
  FC_FSC_ABORT = 15,
  FC_NOT_FAIR = 16,
  FC_SIG_INVALID = 17,
  FC_SPEC_MISMATCH = 18,
  FC_PROTOCOL_ERROR = 19,
  FC_IO_ERROR = 20,
  FC_OVERFLOW = 21,
  FC_INTERNAL = 100
} fc_status;

typedef enum fc_cert_status {
  FC_CERT_CERTIFIED = 0,
  FC_CERT_NOT_FAIR = 1,
  FC_CERT_PRECHECK_FAILED = 2,
  FC_CERT_FSC_ABORT = 3,
  FC_CERT_PROTOCOL_ERROR = 4
} fc_cert_status;

typedef enum fc_infer_status {
  FC_INFER_ACCEPTED = 0,
  FC_INFER_SIG_INVALID = 1,
  FC_INFER_SPEC_MISMATCH = 2,
  FC_INFER_NO_CERTIFICATE = 3,
  FC_INFER_FSC_ABORT = 4,
  FC_INFER_PROTOCOL_ERROR = 5
} fc_infer_status;

typedef enum fc_transport { FC_TRANSPORT_IN_PROCESS = 0, FC_TRANSPORT_TCP = 1 } fc_transport;

typedef struct fc_spec fc_spec;
typedef struct fc_augmentor fc_augmentor;
typedef struct fc_dataset fc_dataset;
typedef struct fc_model fc_model;
typedef struct fc_keypair fc_keypair;
typedef struct fc_cert_outcome fc_cert_outcome;
typedef struct fc_infer_outcome fc_infer_outcome;

/* Message for the last failure on the calling thread; empty after success. */
FAIRCERT_API const char* fc_last_error(void);
FAIRCERT_API const char* fc_status_name(fc_status status);
FAIRCERT_API const char* fc_version(void);
/* Frees strings returned through char** out-parameters. */
FAIRCERT_API void fc_string_free(char* text);

/* Decimal arguments are strings with at most six fractional digits, e.g. "0.05". */

/* ---- statistics ---- */
FAIRCERT_API fc_status fc_min_samples(const char* threshold, const char* efg, const char* delta, uint32_t groups,
                                      uint32_t labels, int efficiency_variant, uint64_t* out);
FAIRCERT_API fc_status fc_tail_bound(uint64_t m, const char* half_width, double* out);

typedef struct fc_gate_report {
  double hash_and_per_bit;
  double merkle_and_per_bit;
  double inference_and_per_weight_bit;
  uint64_t merkle_total;
  uint64_t inference_total;
  int has_overhead;
  double overhead_ratio;
} fc_gate_report;

FAIRCERT_API fc_status fc_estimate_gates(uint64_t model_bytes, uint64_t weight_bits, fc_gate_report* out);

/* ---- fairness spec and augmentor ---- */
/* metric: "ore", "eo" or "dp". alpha NULL selects private mode, otherwise augmented mode. */
FAIRCERT_API fc_status fc_spec_new(const char* metric, const char* epsilon, const char* delta, const char* alpha,
                                   fc_spec** out);
FAIRCERT_API fc_status fc_spec_describe(const fc_spec* spec, char** out);
FAIRCERT_API void fc_spec_free(fc_spec* spec);

FAIRCERT_API fc_status fc_augmentor_new(uint64_t master_seed, const char* noise_sigma, const char* mask_prob,
                                        const char* invoke_prob, const char* degree, fc_augmentor** out);
FAIRCERT_API void fc_augmentor_free(fc_augmentor* augmentor);

/* ---- datasets ---- */
FAIRCERT_API fc_status fc_dataset_load(const char* path, fc_dataset** out);
FAIRCERT_API fc_status fc_dataset_save(const fc_dataset* data, const char* path);
FAIRCERT_API fc_status fc_dataset_info(const fc_dataset* data, uint32_t* dimension, uint32_t* groups, uint32_t* labels,
                                       uint64_t* count);
/* Copies sample i: features (raw Q16.16, capacity `dimension`), group and label. */
FAIRCERT_API fc_status fc_dataset_sample(const fc_dataset* data, uint64_t index, int32_t* features, uint32_t dimension,
                                         uint32_t* group, uint32_t* label);
FAIRCERT_API fc_status fc_dataset_augment(const fc_dataset* data, const fc_augmentor* augmentor, fc_dataset** out);
FAIRCERT_API void fc_dataset_free(fc_dataset* data);

/* ---- planted ground truth (config is JSON text) ---- */
/* per_group != 0: exactly `count` samples per group; otherwise `count` i.i.d. samples. */
FAIRCERT_API fc_status fc_planted_dataset(const char* config_json, uint64_t count, int per_group, uint64_t data_seed,
                                          fc_dataset** out);
FAIRCERT_API fc_status fc_planted_model(const char* config_json, fc_model** out);
/* Population gap of the planted model for the metric, as a decimal string. */
FAIRCERT_API fc_status fc_planted_gap(const char* config_json, const char* metric, char** out);
/* Seed names a subsystem seed derived from `seed`, e.g. "data". */
FAIRCERT_API uint64_t fc_derive_seed(uint64_t seed, const char* name);

/* ---- models ---- */
FAIRCERT_API fc_status fc_model_load(const char* path, fc_model** out);
FAIRCERT_API fc_status fc_model_save(const fc_model* model, const char* path);
FAIRCERT_API fc_status fc_model_info(const fc_model* model, uint32_t* dimension, uint32_t* labels,
                                     uint64_t* weight_count, uint64_t* byte_count);
/* Merkle root of the serialized model, hex encoded. */
FAIRCERT_API fc_status fc_model_digest(const fc_model* model, char** hex_out);
FAIRCERT_API fc_status fc_model_predict(const fc_model* model, const int32_t* features, uint32_t dimension,
                                        uint32_t group, uint32_t* label_out);
/* Counts of a model on a labeled dataset: report text as key=value lines. */
FAIRCERT_API fc_status fc_model_test(const fc_model* model, const fc_dataset* data, const fc_spec* spec, char** report_out);
FAIRCERT_API void fc_model_free(fc_model* model);

/* ---- keys ---- */
FAIRCERT_API fc_status fc_keypair_generate(uint64_t seed, fc_keypair** out);
FAIRCERT_API fc_status fc_keypair_load(const char* path, fc_keypair** out);
FAIRCERT_API fc_status fc_keypair_save(const fc_keypair* keys, const char* path);
FAIRCERT_API fc_status fc_keypair_public_hex(const fc_keypair* keys, char** out);
FAIRCERT_API fc_status fc_keypair_id_hex(const fc_keypair* keys, char** out);
FAIRCERT_API void fc_keypair_free(fc_keypair* keys);

/* ---- certification ---- */
/* Runs regulator, server and dealer in this process. augmentor may be NULL in private mode. */
FAIRCERT_API fc_status fc_certify(const fc_model* model, const fc_dataset* test_set, const fc_keypair* keys,
                                  const fc_spec* spec, const fc_augmentor* augmentor, fc_transport transport,
                                  fc_cert_outcome** out);
/* Regulator role only, against a server and dealer reachable at "host:port". */
FAIRCERT_API fc_status fc_certify_remote(const fc_dataset* test_set, const fc_keypair* keys, const fc_spec* spec,
                                         const fc_augmentor* augmentor, const char* server_endpoint,
                                         const char* dealer_endpoint, fc_cert_outcome** out);
FAIRCERT_API fc_cert_status fc_cert_outcome_status(const fc_cert_outcome* outcome);
FAIRCERT_API const char* fc_cert_outcome_status_name(const fc_cert_outcome* outcome);
FAIRCERT_API const char* fc_cert_outcome_detail(const fc_cert_outcome* outcome);
FAIRCERT_API uint64_t fc_cert_outcome_required(const fc_cert_outcome* outcome);
/* Hex digest h delivered by the secure computation; empty if none. */
FAIRCERT_API const char* fc_cert_outcome_digest(const fc_cert_outcome* outcome);
FAIRCERT_API fc_status fc_cert_outcome_save_certificate(const fc_cert_outcome* outcome, const char* path);
/* Dealer's F_SC transcript and delivery log (empty for remote runs). */
FAIRCERT_API const char* fc_cert_outcome_audit(const fc_cert_outcome* outcome);
FAIRCERT_API const char* fc_cert_outcome_leakage(const fc_cert_outcome* outcome);
/* Wire log of one role: "regulator", "server" or "dealer". */
FAIRCERT_API const char* fc_cert_outcome_transcript(const fc_cert_outcome* outcome, const char* role);
FAIRCERT_API void fc_cert_outcome_free(fc_cert_outcome* outcome);

/* ---- inference ---- */
/* certificate_path may be NULL for a server holding no certificate. */
FAIRCERT_API fc_status fc_infer(const char* regulator_vk_hex, const int32_t* features, uint32_t dimension,
                                uint32_t group, const fc_spec* requested, const fc_model* server_model,
                                const char* certificate_path, fc_transport transport, fc_infer_outcome** out);
FAIRCERT_API fc_status fc_infer_remote(const char* regulator_vk_hex, const int32_t* features, uint32_t dimension,
                                       uint32_t group, const fc_spec* requested, const char* server_endpoint,
                                       const char* dealer_endpoint, fc_infer_outcome** out);
FAIRCERT_API fc_infer_status fc_infer_outcome_status(const fc_infer_outcome* outcome);
FAIRCERT_API const char* fc_infer_outcome_status_name(const fc_infer_outcome* outcome);
FAIRCERT_API const char* fc_infer_outcome_detail(const fc_infer_outcome* outcome);
/* Accepted label; FC_WRONG_STATE unless the prediction was accepted. */
FAIRCERT_API fc_status fc_infer_outcome_label(const fc_infer_outcome* outcome, uint32_t* label);
FAIRCERT_API const char* fc_infer_outcome_audit(const fc_infer_outcome* outcome);
FAIRCERT_API const char* fc_infer_outcome_leakage(const fc_infer_outcome* outcome);
FAIRCERT_API const char* fc_infer_outcome_transcript(const fc_infer_outcome* outcome, const char* role);
FAIRCERT_API void fc_infer_outcome_free(fc_infer_outcome* outcome);

/* ---- standalone network roles (block until `sessions` sessions finish) ---- */
/* Prints "listening <port>" to stdout once bound when announce != 0. */
FAIRCERT_API fc_status fc_run_dealer(const char* listen_endpoint, uint32_t sessions, int announce);
FAIRCERT_API fc_status fc_run_server(const char* listen_endpoint, const char* dealer_endpoint, const fc_model* model,
                                     const char* certificate_in, const char* certificate_out, uint32_t sessions,
                                     int announce);

/* ---- experiments (CSV text out) ---- */
FAIRCERT_API fc_status fc_experiment_coverage(const char* plant_json, const fc_spec* spec, const fc_augmentor* augmentor,
                                              uint32_t trials, uint64_t per_group, int efficiency_variant,
                                              uint32_t threads, char** csv_out);
/* taus: comma separated, "inf" allowed; NULL for the default grid. */
FAIRCERT_API fc_status fc_attack_knn(uint64_t seed, uint32_t per_group, uint32_t fresh, const char* taus,
                                     char** csv_out, int* attack_succeeded);
FAIRCERT_API fc_status fc_attack_knn_custom(const fc_model* fair, const fc_model* unfair, const fc_dataset* reference,
                                            const fc_dataset* test, const fc_dataset* fresh, const char* metric,
                                            const char* taus, char** csv_out, int* attack_succeeded);
FAIRCERT_API fc_status fc_augment_sweep(uint64_t seed, uint32_t per_group, const char* noise_sigma,
                                        const char* mask_prob, const char* degrees, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif

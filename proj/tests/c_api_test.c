#undef NDEBUG
#include <assert.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "faircert/faircert.h"

#define OK(call)                                                             \
  do {                                                                       \
    fc_status s_ = (call);                                                   \
    if (s_ != FC_OK) {                                                       \
      fprintf(stderr, "%s:%d %s -> %s: %s\n", __FILE__, __LINE__, #call,    \
              fc_status_name(s_), fc_last_error());                          \
      return 1;                                                              \
    }                                                                        \
  } while (0)

static const char* kPlant =
    "{\"dimension\":4,\"groups\":2,\"labels\":2,\"weights\":\"uniform\","
    "\"error_rates\":[\"0.2\",\"0.2\"],\"seed\":5}";

int main(void) {
  uint64_t m = 0;
  OK(fc_min_samples("0.1", "0.05", "0.05", 2, 2, 0, &m));
  assert(m == 4061);
  OK(fc_min_samples("0.1", "0.05", "0.2", 100, 1, 1, &m));
  assert(m == 6814);
  assert(fc_min_samples("0.1", "0.1", "0.05", 2, 2, 0, &m) == FC_GAP_NOT_BELOW_THRESHOLD);
  assert(strlen(fc_last_error()) > 0);
  assert(fc_min_samples(NULL, "0", "0.05", 2, 2, 0, &m) == FC_INVALID_ARGUMENT);

  fc_gate_report gates;
  OK(fc_estimate_gates(1000, 8000, &gates));
  assert(gates.hash_and_per_bit == 24.0 && gates.merkle_and_per_bit == 48.0);
  assert(gates.inference_and_per_weight_bit == 191.0);
  assert(gates.has_overhead && gates.overhead_ratio > 0.245 && gates.overhead_ratio < 0.255);

  fc_spec* spec = NULL;
  OK(fc_spec_new("ORE", "0.1", "0.05", NULL, &spec));
  char* text = NULL;
  OK(fc_spec_describe(spec, &text));
  assert(strstr(text, "ORE/private") != NULL);
  fc_string_free(text);
  fc_spec* bad = NULL;
  assert(fc_spec_new("ORE", "1.5", "0.05", NULL, &bad) != FC_OK && bad == NULL);

  fc_dataset* data = NULL;
  OK(fc_planted_dataset(kPlant, 6000, 1, 11, &data));
  uint32_t dim = 0, groups = 0, labels = 0;
  uint64_t count = 0;
  OK(fc_dataset_info(data, &dim, &groups, &labels, &count));
  assert(dim == 4 && groups == 2 && labels == 2 && count == 12000);

  fc_model* model = NULL;
  OK(fc_planted_model(kPlant, &model));
  uint64_t weights = 0, bytes = 0;
  OK(fc_model_info(model, &dim, &labels, &weights, &bytes));
  assert(weights == 10 && bytes > 0);

  fc_keypair* keys = NULL;
  OK(fc_keypair_generate(3, &keys));
  char* vk = NULL;
  OK(fc_keypair_public_hex(keys, &vk));
  assert(strlen(vk) == 64);

  fc_cert_outcome* cert = NULL;
  OK(fc_certify(model, data, keys, spec, NULL, FC_TRANSPORT_IN_PROCESS, &cert));
  if (fc_cert_outcome_status(cert) != FC_CERT_CERTIFIED) {
    fprintf(stderr, "certify: %s %s\n", fc_cert_outcome_status_name(cert), fc_cert_outcome_detail(cert));
    return 1;
  }
  char* digest = NULL;
  OK(fc_model_digest(model, &digest));
  assert(strcmp(digest, fc_cert_outcome_digest(cert)) == 0);
  assert(strlen(fc_cert_outcome_transcript(cert, "server")) > 0);
  assert(strstr(fc_cert_outcome_leakage(cert), "b") != NULL);

  char path[] = "/tmp/faircert_capi_XXXXXX";
  int fd = mkstemp(path);
  assert(fd >= 0);
  OK(fc_cert_outcome_save_certificate(cert, path));

  int32_t x[4] = {2 * 65536, 0, 0, 0};
  uint32_t expected = 0, label = 99;
  OK(fc_model_predict(model, x, 4, 1, &expected));
  fc_infer_outcome* inf = NULL;
  OK(fc_infer(vk, x, 4, 1, spec, model, path, FC_TRANSPORT_IN_PROCESS, &inf));
  assert(fc_infer_outcome_status(inf) == FC_INFER_ACCEPTED);
  OK(fc_infer_outcome_label(inf, &label));
  assert(label == expected);
  fc_infer_outcome_free(inf);

  fc_infer_outcome* none = NULL;
  OK(fc_infer(vk, x, 4, 1, spec, model, NULL, FC_TRANSPORT_IN_PROCESS, &none));
  assert(fc_infer_outcome_status(none) == FC_INFER_NO_CERTIFICATE);
  assert(fc_infer_outcome_label(none, &label) != FC_OK);
  fc_infer_outcome_free(none);

  fc_spec* tighter = NULL;
  OK(fc_spec_new("ORE", "0.05", "0.05", NULL, &tighter));
  OK(fc_infer(vk, x, 4, 1, tighter, model, path, FC_TRANSPORT_IN_PROCESS, &inf));
  assert(fc_infer_outcome_status(inf) == FC_INFER_SPEC_MISMATCH);
  fc_infer_outcome_free(inf);

  assert(fc_model_load("/nonexistent/model.bin", &model) == FC_IO_ERROR);

  remove(path);
  fc_spec_free(tighter);
  fc_string_free(digest);
  fc_string_free(vk);
  fc_cert_outcome_free(cert);
  fc_keypair_free(keys);
  fc_model_free(model);
  fc_dataset_free(data);
  fc_spec_free(spec);
  puts("c api ok");
  return 0;
}

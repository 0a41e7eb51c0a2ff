#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "faircert/bytes.hpp"
#include "faircert/data.hpp"
#include "faircert/rational.hpp"

namespace faircert {

enum class Architecture : std::uint8_t {
  threshold_linear = 1,
  lookup_table = 2,
  biased_wrapper = 3,
};

class ModelSpec;

/// score_y = <w_y, x> + b_y; predict argmax, lowest label wins ties.
struct LinearParams {
  std::vector<Q16> weights;  // num_labels rows of `dimension` values
  std::vector<Q16> bias;     // num_labels

  friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

struct LookupEntry {
  std::vector<Q16> key;
  LabelId label = 0;

  friend bool operator==(const LookupEntry&, const LookupEntry&) = default;
};

/// Exact-match table over a finite input domain; anything else maps to default_label.
struct LookupParams {
  LabelId default_label = 0;
  std::vector<LookupEntry> entries;

  friend bool operator==(const LookupParams&, const LookupParams&) = default;
};

/// Flips the inner prediction with a per-group rate. The coin is derived from
/// (seed, feature bytes, group), so the wrapper is still a function of its input.
struct BiasedParams {
  std::shared_ptr<const ModelSpec> inner;
  std::vector<Micro> flip_rates;  // per group
  std::uint64_t seed = 0;

  friend bool operator==(const BiasedParams& a, const BiasedParams& b);
};

class ModelSpec {
 public:
  using Params = std::variant<LinearParams, LookupParams, BiasedParams>;

  static ModelSpec linear(std::uint32_t dimension, std::uint32_t num_labels, std::vector<Q16> weights,
                          std::vector<Q16> bias);
  static ModelSpec zero_linear(std::uint32_t dimension, std::uint32_t num_labels);
  static ModelSpec lookup(std::uint32_t dimension, std::uint32_t num_labels, LabelId default_label,
                          std::vector<LookupEntry> entries);
  static ModelSpec biased(ModelSpec inner, std::vector<Micro> flip_rates, std::uint64_t seed);

  Architecture architecture() const noexcept { return static_cast<Architecture>(params_.index() + 1); }
  std::uint32_t dimension() const noexcept { return dimension_; }
  std::uint32_t num_labels() const noexcept { return num_labels_; }
  const Params& params() const noexcept { return params_; }

  /// Number of Q16.16 parameters, recursively (flip rates and seed excluded).
  std::size_t weight_count() const noexcept;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(std::uint32_t dimension, std::uint32_t num_labels, Params params)
      : dimension_(dimension), num_labels_(num_labels), params_(std::move(params)) {}
  void validate() const;

  std::uint32_t dimension_ = 0;
  std::uint32_t num_labels_ = 0;
  Params params_;
};

LabelId predict(const ModelSpec& model, std::span<const Q16> features, GroupId group);
inline LabelId predict(const ModelSpec& model, const Sample& sample) {
  return predict(model, sample.features, sample.group);
}
std::vector<LabelId> predict_all(const ModelSpec& model, const Dataset& data);

/// Linear scores in Q16.16 (wide accumulation, one saturation at the end).
std::vector<Q16> linear_scores(const ModelSpec& model, std::span<const Q16> features);

/// Canonical bytes: "FAIRM1" | arch u8 | dimension u32 | num_labels u32 | parameters.
Bytes serialize_model(const ModelSpec& model);
/// Throws MALFORMED_MODEL on any structural problem.
ModelSpec deserialize_model(ByteView bytes);

}  // namespace faircert

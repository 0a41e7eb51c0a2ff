#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faircert/data.hpp"
#include "faircert/model.hpp"
#include "faircert/rational.hpp"

namespace faircert {

/// Synthetic ground truth: a (group, label) mixture and a classifier whose
/// per-group risk is known exactly.
struct PlantedConfig {
  std::uint32_t dimension = 4;
  std::uint32_t num_groups = 2;
  std::uint32_t num_labels = 2;
  std::vector<Micro> weights;      // [g * num_labels + y], sums to exactly 1
  std::vector<Micro> error_rates;  // [g]
  std::uint64_t seed = 0;

  /// Throws INVALID_WEIGHTS / INVALID_ARGUMENT.
  void validate() const;

  static PlantedConfig uniform(std::uint32_t groups, std::uint32_t labels, std::vector<Micro> error_rates,
                               std::uint64_t seed, std::uint32_t dimension = 4);
};

struct TrueGaps {
  Rational ore;
  Rational eo;
  Rational dp;
};

struct PlantedDraw {
  Dataset data;
  ModelSpec model;
  TrueGaps gaps;
};

/// Analytic population gaps of planted_model(config) under the configured mixture.
TrueGaps true_gaps(const PlantedConfig& config);

/// Linear model that classifies every generated sample correctly: w_y = e_y.
ModelSpec planted_base_model(const PlantedConfig& config);

/// Base model wrapped with per-group flip rates equal to the configured error rates.
ModelSpec planted_model(const PlantedConfig& config);

/// Draws m i.i.d. samples from the mixture.
Dataset draw_planted(const PlantedConfig& config, std::size_t m, std::uint64_t data_seed);

/// Draws exactly per_group samples for every group; labels follow P(y | g).
Dataset draw_planted_per_group(const PlantedConfig& config, std::size_t per_group, std::uint64_t data_seed);

/// m i.i.d. samples, the planted model, and its analytic gaps; all seeded from config.seed.
PlantedDraw generate_planted(const PlantedConfig& config, std::size_t m);

/// JSON: {"dimension","groups","labels","weights":[[..]..],"error_rates":[..],"seed"}.
PlantedConfig parse_planted_config(const std::string& json_text);
std::string planted_config_to_json(const PlantedConfig& config);

}  // namespace faircert

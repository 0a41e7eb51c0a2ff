#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "faircert/augmentor.hpp"
#include "faircert/fairness.hpp"
#include "faircert/model.hpp"
#include "faircert/planted.hpp"

namespace faircert {

/// Fixed six-decimal rendering used by every CSV so outputs are byte-stable.
std::string format_decimal(long double value);

/// Gap of the chosen metric for the planted population.
Rational planted_gap(const TrueGaps& gaps, FairnessMetric metric);

// ---------------------------------------------------------------------------
// Coverage: repeated draw-and-test cycles against a planted model.

struct CoverageConfig {
  PlantedConfig plant;
  FairnessSpec spec;
  std::uint32_t trials = 1;
  std::optional<std::uint64_t> per_group;  // default: the bound at EFG = threshold / 2
  BoundVariant variant = BoundVariant::union_bound;
  std::optional<AugmentorConfig> augmentor;  // augmented mode; the seed is re-derived per trial
  unsigned threads = 0;                      // 0 = hardware concurrency
};

struct CoverageRow {
  std::uint32_t trial = 0;
  Rational efg;
  bool certified = false;
  std::string note;  // set when the test could not be evaluated
};

struct CoverageResult {
  Rational true_gap;
  bool fair_plant = false;  // true gap below the threshold
  std::uint64_t per_group = 0;
  std::vector<CoverageRow> rows;  // trial order

  std::uint32_t certified() const;
  double certification_rate() const;
};

CoverageResult run_coverage(const CoverageConfig& config);
/// trial,true_gap,efg,decision rows plus one summary row.
std::string coverage_csv(const CoverageResult& result);

// ---------------------------------------------------------------------------
// kNN routing attack: a hybrid answers with the fair model near a reference set
// and with the unfair model elsewhere.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct KnnAttackSetup {
  ModelSpec fair;
  ModelSpec unfair;
  Dataset reference;  // the attacker's own augmentation of the public test set
  Dataset test;       // the regulator's fresh-seed augmentation of the same set
  Dataset fresh;      // new samples seen after certification
  FairnessMetric metric = FairnessMetric::ore;
  std::vector<double> taus;
};

struct KnnRow {
  double tau = 0;
  Rational accuracy;       // hybrid on fresh samples
  Rational efg;            // hybrid on the regulator's test set
  Rational routed;         // share of fresh samples sent to the unfair model
};

struct KnnAttackResult {
  std::vector<KnnRow> rows;
  Rational fair_efg, unfair_efg;            // on the test set
  Rational fair_accuracy, unfair_accuracy;  // on fresh samples
};

struct KnnFixtureConfig {
  std::uint64_t seed = 0;
  std::uint32_t per_group = 1000;
  std::uint32_t fresh = 2000;
  std::vector<Micro> fair_rates{Micro{200'000}, Micro{200'000}};
  std::vector<Micro> unfair_rates{Micro{20'000}, Micro{220'000}};
  Q16 noise_sigma = Q16::from_raw(16384);  // 0.25
  Micro mask_prob{100'000};
  std::vector<double> taus;                // empty: default grid
};

std::vector<double> default_tau_grid();
KnnAttackSetup knn_fixture(const KnnFixtureConfig& config);
/// 1-NN distance by brute force (L2 over real-valued features).
std::vector<double> nearest_distances(const Dataset& queries, const Dataset& reference);
KnnAttackResult run_knn_attack(const KnnAttackSetup& setup);
/// tau,accuracy,efg,routed_fraction
std::string knn_csv(const KnnAttackResult& result);
/// True if some tau is within `slack` of the fair EFG and of the unfair accuracy at once.
bool attack_succeeds(const KnnAttackResult& result, double slack = 0.01);

// ---------------------------------------------------------------------------
// Accuracy and EFG of two planted models under increasing augmentation degree.

struct AugmentSweepConfig {
  std::uint64_t seed = 0;
  std::uint32_t per_group = 2000;
  std::vector<Micro> fair_rates{Micro{200'000}, Micro{200'000}};
  std::vector<Micro> unfair_rates{Micro{20'000}, Micro{220'000}};
  Q16 noise_sigma = Q16::from_raw(65536);  // 1.0
  Micro mask_prob{250'000};
  std::vector<Micro> degrees{Micro{0}, Micro{250'000}, Micro{500'000}, Micro{750'000}, Micro{1'000'000}};
  FairnessMetric metric = FairnessMetric::ore;
};

struct AugmentSweepRow {
  Micro degree;
  Rational fair_accuracy, fair_efg, unfair_accuracy, unfair_efg;
};

std::vector<AugmentSweepRow> run_augment_sweep(const AugmentSweepConfig& config);
/// degree,fair_accuracy,fair_efg,unfair_accuracy,unfair_efg
std::string augment_sweep_csv(const std::vector<AugmentSweepRow>& rows);

Rational accuracy(const Dataset& data, std::span<const LabelId> predictions);

}  // namespace faircert

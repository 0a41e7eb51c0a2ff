#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faircert/data.hpp"
#include "faircert/rational.hpp"

namespace faircert {

enum class FairnessMetric : std::uint8_t {
  ore = 0,  // overall risk equality
  eo = 1,   // equalized odds
  dp = 2,   // demographic parity
};

enum class TestMode : std::uint8_t { private_data = 0, augmented = 1 };

std::string metric_name(FairnessMetric metric);
FairnessMetric parse_metric(std::string_view name);

/// Identifier bound into certificates, e.g. "ORE/private" or "EO/augmented".
std::string canonical_fairness_string(FairnessMetric metric, TestMode mode);

struct FairnessSpec {
  FairnessMetric metric = FairnessMetric::ore;
  Micro epsilon;
  Micro delta;
  std::optional<Micro> alpha;  // present iff augmented mode
  std::string fairness_string;

  /// Builds a validated spec with the canonical fairness string.
  static FairnessSpec make(FairnessMetric metric, Micro epsilon, Micro delta, std::optional<Micro> alpha = {});

  TestMode mode() const noexcept { return alpha ? TestMode::augmented : TestMode::private_data; }
  /// ε in private mode, α in augmented mode.
  Rational threshold() const { return (alpha ? *alpha : epsilon).to_rational(); }

  /// Throws INVALID_ARGUMENT unless ε, δ, α ∈ (0,1) and the fairness string matches (metric, mode).
  void validate() const;

  friend bool operator==(const FairnessSpec&, const FairnessSpec&) = default;
};

/// Count table over a labeled test set and the model's predictions.
struct GroupRiskTable {
  std::uint32_t num_groups = 0;
  std::uint32_t num_labels = 0;
  std::vector<std::uint64_t> m_g;     // [g]
  std::vector<std::uint64_t> err_g;   // [g]
  std::vector<std::uint64_t> m_gy;    // [g * num_labels + y]
  std::vector<std::uint64_t> err_gy;  // true label y, prediction != y
  std::vector<std::uint64_t> pred_gy; // prediction == y, any true label

  GroupRiskTable() = default;
  GroupRiskTable(std::uint32_t groups, std::uint32_t labels);

  std::size_t cell(GroupId g, LabelId y) const noexcept { return std::size_t{g} * num_labels + y; }
  std::uint64_t total() const noexcept;

  /// Throws INVALID_ARGUMENT if any count invariant is violated.
  void validate() const;

  friend bool operator==(const GroupRiskTable&, const GroupRiskTable&) = default;
};

GroupRiskTable build_risk_table(const Dataset& data, std::span<const LabelId> predictions);

/// Largest pairwise difference of per-group risk (ORE), label-conditioned risk (EO)
/// or prediction likelihood (DP). Exact. Zero when fewer than two groups.
Rational empirical_gap(const GroupRiskTable& table, FairnessMetric metric);

enum class BoundVariant : std::uint8_t {
  union_bound, // ln(2|G||Y|/δ)
  efficiency,  // ln(2|G|/δ²), reproduces the worked cost example only
};

/// ceil( 2/(t − efg)² · ln(2|G||Y|/δ) ). Throws GAP_NOT_BELOW_THRESHOLD when efg >= t.
std::uint64_t min_samples(const Rational& threshold, const Rational& efg, const Rational& delta,
                          std::uint32_t num_groups, std::uint32_t num_labels,
                          BoundVariant variant = BoundVariant::union_bound);

/// Same bound with t = spec.threshold().
std::uint64_t min_samples(const FairnessSpec& spec, const Rational& efg, std::uint32_t num_groups,
                          std::uint32_t num_labels, BoundVariant variant = BoundVariant::union_bound);

/// Single-group Hoeffding deviation probability min(1, 2·exp(−m·(2w)²/2)).
long double tail_bound(std::uint64_t m, const Rational& half_width);

/// Counts the bound applies to: m_{g,y} for EO, m_g otherwise.
std::vector<std::uint64_t> relevant_counts(const GroupRiskTable& table, FairnessMetric metric);

enum class FailureReason : std::uint8_t { efg_too_large = 1, insufficient_samples = 2 };
std::string failure_reason_name(FailureReason reason);

struct TestReport {
  FairnessMetric metric = FairnessMetric::ore;
  TestMode mode = TestMode::private_data;
  Rational efg;
  Rational threshold;
  std::uint64_t per_group_required = 0;  // 0 when efg >= threshold (bound undefined)
  std::vector<std::uint64_t> per_group_actual;
  bool passed = false;
  std::optional<FailureReason> failure_reason;

  friend bool operator==(const TestReport&, const TestReport&) = default;
};

/// Pass iff EFG < t and every relevant count reaches min_samples(spec, EFG).
TestReport decide(const FairnessSpec& spec, const GroupRiskTable& table);

/// key=value lines, one field per line.
std::string to_text(const TestReport& report);

}  // namespace faircert

#include "faircert/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace faircert {

std::string metric_name(FairnessMetric metric) {
  switch (metric) {
    case FairnessMetric::ore: return "ORE";
    case FairnessMetric::eo: return "EO";
    case FairnessMetric::dp: return "DP";
  }
  fail(ErrorCode::invalid_argument, "unknown metric");
}

FairnessMetric parse_metric(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ore") return FairnessMetric::ore;
  if (lower == "eo") return FairnessMetric::eo;
  if (lower == "dp") return FairnessMetric::dp;
  fail(ErrorCode::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

std::string canonical_fairness_string(FairnessMetric metric, TestMode mode) {
  return metric_name(metric) + (mode == TestMode::augmented ? "/augmented" : "/private");
}

FairnessSpec FairnessSpec::make(FairnessMetric metric, Micro epsilon, Micro delta, std::optional<Micro> alpha) {
  FairnessSpec spec{metric, epsilon, delta, alpha, {}};
  spec.fairness_string = canonical_fairness_string(metric, spec.mode());
  spec.validate();
  return spec;
}

void FairnessSpec::validate() const {
  require(static_cast<std::uint8_t>(metric) <= 2, ErrorCode::invalid_argument, "metric id");
  require(epsilon.in_open_unit_interval(), ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  require(delta.in_open_unit_interval(), ErrorCode::invalid_argument, "delta must lie in (0,1)");
  require(!alpha || alpha->in_open_unit_interval(), ErrorCode::invalid_argument, "alpha must lie in (0,1)");
  require(fairness_string == canonical_fairness_string(metric, mode()), ErrorCode::invalid_argument,
          "fairness string '" + fairness_string + "' does not match metric and mode");
}

GroupRiskTable::GroupRiskTable(std::uint32_t groups, std::uint32_t labels)
    : num_groups(groups),
      num_labels(labels),
      m_g(groups, 0),
      err_g(groups, 0),
      m_gy(std::size_t{groups} * labels, 0),
      err_gy(std::size_t{groups} * labels, 0),
      pred_gy(std::size_t{groups} * labels, 0) {}

std::uint64_t GroupRiskTable::total() const noexcept {
  std::uint64_t sum = 0;
  for (std::uint64_t m : m_g) sum += m;
  return sum;
}

void GroupRiskTable::validate() const {
  const std::size_t cells = std::size_t{num_groups} * num_labels;
  require(m_g.size() == num_groups && err_g.size() == num_groups && m_gy.size() == cells &&
              err_gy.size() == cells && pred_gy.size() == cells,
          ErrorCode::invalid_argument, "table shape");
  for (GroupId g = 0; g < num_groups; ++g) {
    std::uint64_t sum_m = 0, sum_pred = 0, sum_err = 0;
    for (LabelId y = 0; y < num_labels; ++y) {
      const std::size_t c = cell(g, y);
      require(err_gy[c] <= m_gy[c], ErrorCode::invalid_argument, "err_gy exceeds m_gy");
      sum_m += m_gy[c];
      sum_pred += pred_gy[c];
      sum_err += err_gy[c];
    }
    require(err_g[g] <= m_g[g], ErrorCode::invalid_argument, "err_g exceeds m_g");
    require(sum_m == m_g[g], ErrorCode::invalid_argument, "sum of m_gy differs from m_g");
    require(sum_pred == m_g[g], ErrorCode::invalid_argument, "sum of pred_gy differs from m_g");
    require(sum_err == err_g[g], ErrorCode::invalid_argument, "sum of err_gy differs from err_g");
    require(m_g[g] < (std::uint64_t{1} << 31), ErrorCode::overflow, "group count exceeds 2^31");
  }
}

GroupRiskTable build_risk_table(const Dataset& data, std::span<const LabelId> predictions) {
  require(predictions.size() == data.size(), ErrorCode::length_mismatch,
          std::to_string(predictions.size()) + " predictions for " + std::to_string(data.size()) + " samples");
  GroupRiskTable t(data.num_groups, data.num_labels);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    const LabelId yhat = predictions[i];
    require(s.group < data.num_groups && s.label < data.num_labels && yhat < data.num_labels,
            ErrorCode::id_out_of_range, "sample " + std::to_string(i));
    ++t.m_g[s.group];
    ++t.m_gy[t.cell(s.group, s.label)];
    ++t.pred_gy[t.cell(s.group, yhat)];
    if (yhat != s.label) {
      ++t.err_g[s.group];
      ++t.err_gy[t.cell(s.group, s.label)];
    }
  }
  return t;
}

namespace {

Rational ratio(std::uint64_t num, std::uint64_t den) {
  require(den > 0, ErrorCode::empty_cell, "zero denominator");
  return Rational::from_wide(static_cast<int128>(num), static_cast<int128>(den));
}

// Max pairwise |a_g − a_h| over one family of per-group rates equals max − min.
Rational spread(const std::vector<Rational>& rates) {
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return *hi - *lo;
}

}  // namespace

Rational empirical_gap(const GroupRiskTable& table, FairnessMetric metric) {
  table.validate();
  if (table.num_groups < 2) return Rational(0);

  const std::uint32_t G = table.num_groups;
  const std::uint32_t Y = table.num_labels;
  Rational gap(0);
  switch (metric) {
    case FairnessMetric::ore: {
      std::vector<Rational> risk;
      for (GroupId g = 0; g < G; ++g) {
        require(table.m_g[g] > 0, ErrorCode::empty_cell, "group " + std::to_string(g) + " has no samples");
        risk.push_back(ratio(table.err_g[g], table.m_g[g]));
      }
      gap = spread(risk);
      break;
    }
    case FairnessMetric::eo: {
      for (LabelId y = 0; y < Y; ++y) {
        std::vector<Rational> risk;
        for (GroupId g = 0; g < G; ++g) {
          const std::size_t c = table.cell(g, y);
          require(table.m_gy[c] > 0, ErrorCode::empty_cell,
                  "cell (" + std::to_string(g) + "," + std::to_string(y) + ") has no samples");
          risk.push_back(ratio(table.err_gy[c], table.m_gy[c]));
        }
        gap = std::max(gap, spread(risk));
      }
      break;
    }
    case FairnessMetric::dp: {
      for (GroupId g = 0; g < G; ++g)
        require(table.m_g[g] > 0, ErrorCode::empty_cell, "group " + std::to_string(g) + " has no samples");
      for (LabelId y = 0; y < Y; ++y) {
        std::vector<Rational> likelihood;
        for (GroupId g = 0; g < G; ++g) likelihood.push_back(ratio(table.pred_gy[table.cell(g, y)], table.m_g[g]));
        gap = std::max(gap, spread(likelihood));
      }
      break;
    }
  }
  return gap;
}

std::uint64_t min_samples(const Rational& threshold, const Rational& efg, const Rational& delta,
                          std::uint32_t num_groups, std::uint32_t num_labels, BoundVariant variant) {
  require(num_groups >= 1 && num_labels >= 1, ErrorCode::invalid_argument, "cardinalities must be positive");
  require(delta > Rational(0) && delta < Rational(1), ErrorCode::invalid_argument, "delta must lie in (0,1)");
  require(efg >= Rational(0), ErrorCode::invalid_argument, "negative gap");
  require(efg < threshold, ErrorCode::gap_not_below_threshold,
          "gap " + efg.to_string() + " is not below threshold " + threshold.to_string());

  // t - efg can outgrow 64-bit terms for large tables, so form it in 128 bits
  const int128 margin_num = static_cast<int128>(threshold.num()) * efg.den() - static_cast<int128>(efg.num()) * threshold.den();
  const int128 margin_den = static_cast<int128>(threshold.den()) * efg.den();
  const long double margin = static_cast<long double>(margin_num) / static_cast<long double>(margin_den);
  const long double ln_delta = std::log(delta.to_long_double());
  const long double log_term =
      variant == BoundVariant::union_bound
          ? std::log(2.0L * num_groups * num_labels) - ln_delta
          : std::log(2.0L * num_groups) - 2.0L * ln_delta;
  const long double bound = 2.0L / (margin * margin) * log_term;
  require(bound < 9.0e18L, ErrorCode::overflow, "sample bound exceeds 64-bit range");
  return static_cast<std::uint64_t>(std::ceil(bound));
}

std::uint64_t min_samples(const FairnessSpec& spec, const Rational& efg, std::uint32_t num_groups,
                          std::uint32_t num_labels, BoundVariant variant) {
  spec.validate();
  return min_samples(spec.threshold(), efg, spec.delta.to_rational(), num_groups, num_labels, variant);
}

long double tail_bound(std::uint64_t m, const Rational& half_width) {
  require(m >= 1, ErrorCode::invalid_argument, "m must be positive");
  require(half_width > Rational(0), ErrorCode::invalid_argument, "half width must be positive");
  const long double w = half_width.to_long_double();
  const long double v = 2.0L * std::exp(-static_cast<long double>(m) * (2.0L * w) * (2.0L * w) / 2.0L);
  return std::min(1.0L, v);
}

std::vector<std::uint64_t> relevant_counts(const GroupRiskTable& table, FairnessMetric metric) {
  return metric == FairnessMetric::eo ? table.m_gy : table.m_g;
}

std::string failure_reason_name(FailureReason reason) {
  return reason == FailureReason::efg_too_large ? "EFG_TOO_LARGE" : "INSUFFICIENT_SAMPLES";
}

TestReport decide(const FairnessSpec& spec, const GroupRiskTable& table) {
  spec.validate();
  TestReport report;
  report.metric = spec.metric;
  report.mode = spec.mode();
  report.threshold = spec.threshold();
  report.efg = empirical_gap(table, spec.metric);
  report.per_group_actual = relevant_counts(table, spec.metric);

  if (!(report.efg < report.threshold)) {
    report.failure_reason = FailureReason::efg_too_large;
    return report;
  }
  report.per_group_required = min_samples(spec, report.efg, table.num_groups, table.num_labels);
  const std::uint64_t smallest =
      report.per_group_actual.empty()
          ? 0
          : *std::min_element(report.per_group_actual.begin(), report.per_group_actual.end());
  if (smallest < report.per_group_required) {
    report.failure_reason = FailureReason::insufficient_samples;
    return report;
  }
  report.passed = true;
  return report;
}

std::string to_text(const TestReport& report) {
  std::ostringstream out;
  out << "metric=" << metric_name(report.metric) << '\n'
      << "mode=" << (report.mode == TestMode::augmented ? "augmented" : "private") << '\n'
      << "efg=" << report.efg.to_string() << '\n'
      << "threshold=" << report.threshold.to_string() << '\n'
      << "required=" << report.per_group_required << '\n'
      << "actual=";
  for (std::size_t i = 0; i < report.per_group_actual.size(); ++i)
    out << (i ? "," : "") << report.per_group_actual[i];
  out << '\n'
      << "decision=" << (report.passed ? "pass" : "fail") << '\n'
      << "reason=" << (report.failure_reason ? failure_reason_name(*report.failure_reason) : "") << '\n';
  return out.str();
}

}  // namespace faircert

#include "doctest.h"

#include <cmath>

#include "faircert/fairness.hpp"
#include "faircert/prg.hpp"
#include "faircert/wire.hpp"

using namespace faircert;

namespace {

Dataset make(std::uint32_t groups, std::uint32_t labels, std::vector<std::pair<GroupId, LabelId>> gy) {
  Dataset d{1, groups, labels, {}};
  for (auto [g, y] : gy) d.samples.push_back(Sample{{Q16{}}, g, y});
  return d;
}

// Literal evaluation of the gap definitions by scanning the samples for every pair.
std::optional<Rational> brute_gap(const Dataset& d, std::span<const LabelId> pred, FairnessMetric metric) {
  Rational best(0);
  const auto rate = [&](GroupId g, std::optional<LabelId> y, bool likelihood) -> std::optional<Rational> {
    std::int64_t num = 0, den = 0;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
      const Sample& s = d.samples[i];
      if (s.group != g) continue;
      if (likelihood) {
        ++den;
        num += pred[i] == *y;
      } else if (!y || s.label == *y) {
        ++den;
        num += pred[i] != s.label;
      }
    }
    if (den == 0) return std::nullopt;
    return Rational(num, den);
  };
  for (GroupId g0 = 0; g0 < d.num_groups; ++g0)
    for (GroupId g1 = 0; g1 < d.num_groups; ++g1) {
      if (g0 == g1) continue;
      if (metric == FairnessMetric::ore) {
        auto a = rate(g0, std::nullopt, false), b = rate(g1, std::nullopt, false);
        if (!a || !b) return std::nullopt;
        best = std::max(best, (*a - *b).abs());
        continue;
      }
      for (LabelId y = 0; y < d.num_labels; ++y) {
        const bool dp = metric == FairnessMetric::dp;
        auto a = rate(g0, y, dp), b = rate(g1, y, dp);
        if (!a || !b) return std::nullopt;
        best = std::max(best, (*a - *b).abs());
      }
    }
  return best;
}

FairnessSpec spec(const char* eps, const char* delta, FairnessMetric m = FairnessMetric::ore) {
  return FairnessSpec::make(m, Micro::parse(eps), Micro::parse(delta));
}

/// Table with the given per-group (m, err) and a perfectly balanced label split.
GroupRiskTable two_group_table(std::uint64_t m0, std::uint64_t e0, std::uint64_t m1, std::uint64_t e1) {
  GroupRiskTable t(2, 2);
  const std::uint64_t m[2] = {m0, m1}, e[2] = {e0, e1};
  for (int g = 0; g < 2; ++g) {
    t.m_g[g] = m[g];
    t.err_g[g] = e[g];
    t.m_gy[t.cell(g, 0)] = m[g] / 2;
    t.m_gy[t.cell(g, 1)] = m[g] - m[g] / 2;
    t.err_gy[t.cell(g, 0)] = std::min(e[g], m[g] / 2);
    t.err_gy[t.cell(g, 1)] = e[g] - t.err_gy[t.cell(g, 0)];
    t.pred_gy[t.cell(g, 0)] = m[g] / 2;
    t.pred_gy[t.cell(g, 1)] = m[g] - m[g] / 2;
  }
  return t;
}

}  // namespace

TEST_SUITE("fairness") {

TEST_CASE("four-sample hand example") {
  // A = 0, B = 1
  const Dataset d = make(2, 2, {{0, 1}, {0, 0}, {1, 1}, {1, 0}});
  const std::vector<LabelId> pred{1, 1, 1, 0};
  const GroupRiskTable t = build_risk_table(d, pred);
  CHECK(t.m_g == std::vector<std::uint64_t>{2, 2});
  CHECK(t.err_g == std::vector<std::uint64_t>{1, 0});
  CHECK(empirical_gap(t, FairnessMetric::ore) == Rational(1, 2));
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("perfect and all-wrong classifiers") {
  const Dataset d = make(3, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}});
  std::vector<LabelId> right, wrong;
  for (const Sample& s : d.samples) {
    right.push_back(s.label);
    wrong.push_back(1 - s.label);
  }
  const GroupRiskTable tr = build_risk_table(d, right), tw = build_risk_table(d, wrong);
  for (GroupId g = 0; g < 3; ++g) {
    CHECK(tr.err_g[g] == 0);
    CHECK(tw.err_g[g] == tw.m_g[g]);
  }
  CHECK(empirical_gap(tr, FairnessMetric::ore) == Rational(0));
  CHECK(empirical_gap(tr, FairnessMetric::eo) == Rational(0));
  // identical label frequencies per group, so DP of the perfect classifier is 0 too
  CHECK(empirical_gap(tr, FairnessMetric::dp) == Rational(0));
}

TEST_CASE("single group has zero gap") {
  const Dataset d = make(1, 2, {{0, 0}, {0, 1}, {0, 1}});
  const std::vector<LabelId> pred{1, 1, 0};
  const GroupRiskTable t = build_risk_table(d, pred);
  for (auto m : {FairnessMetric::ore, FairnessMetric::eo, FairnessMetric::dp}) CHECK(empirical_gap(t, m) == Rational(0));
}

TEST_CASE("build_risk_table rejects bad input") {
  const Dataset d = make(2, 2, {{0, 0}, {1, 1}});
  CHECK_THROWS_WITH_AS(build_risk_table(d, std::vector<LabelId>{0}), doctest::Contains("LENGTH_MISMATCH"), Error);
  CHECK_THROWS_WITH_AS(build_risk_table(d, std::vector<LabelId>{0, 2}), doctest::Contains("ID_OUT_OF_RANGE"), Error);
  const Dataset bad = make(2, 2, {{0, 0}, {2, 1}});
  CHECK_THROWS_WITH_AS(build_risk_table(bad, std::vector<LabelId>{0, 0}), doctest::Contains("ID_OUT_OF_RANGE"), Error);
}

TEST_CASE("empty cells raise EMPTY_CELL") {
  const Dataset d = make(2, 2, {{0, 0}, {0, 1}, {1, 0}});
  const GroupRiskTable t = build_risk_table(d, std::vector<LabelId>{0, 0, 0});
  CHECK_NOTHROW(empirical_gap(t, FairnessMetric::ore));
  CHECK_NOTHROW(empirical_gap(t, FairnessMetric::dp));
  CHECK_THROWS_WITH_AS(empirical_gap(t, FairnessMetric::eo), doctest::Contains("EMPTY_CELL"), Error);
  const Dataset d2 = make(3, 2, {{0, 0}, {1, 1}});
  CHECK_THROWS_WITH_AS(empirical_gap(build_risk_table(d2, std::vector<LabelId>{0, 0}), FairnessMetric::ore),
                       doctest::Contains("EMPTY_CELL"), Error);
}

TEST_CASE("brute-force equivalence for small test sets") {
  CounterPrg prg(2024);
  int compared = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto groups = static_cast<std::uint32_t>(1 + prg.below(3));
    const auto labels = static_cast<std::uint32_t>(2 + prg.below(2));
    const auto n = static_cast<std::size_t>(1 + prg.below(12));
    Dataset d{1, groups, labels, {}};
    std::vector<LabelId> pred;
    for (std::size_t i = 0; i < n; ++i) {
      d.samples.push_back(Sample{{Q16{}}, static_cast<GroupId>(prg.below(groups)), static_cast<LabelId>(prg.below(labels))});
      pred.push_back(static_cast<LabelId>(prg.below(labels)));
    }
    const GroupRiskTable t = build_risk_table(d, pred);
    CHECK_NOTHROW(t.validate());
    for (auto metric : {FairnessMetric::ore, FairnessMetric::eo, FairnessMetric::dp}) {
      const auto expected = brute_gap(d, pred, metric);
      if (!expected && groups > 1) {
        CHECK_THROWS_AS(empirical_gap(t, metric), Error);
        continue;
      }
      CHECK(empirical_gap(t, metric) == expected.value_or(Rational(0)));
      ++compared;
    }
  }
  CHECK(compared > 2000);
}

TEST_CASE("union bound examples") {
  CHECK(min_samples(spec("0.1", "0.05"), Rational(1, 20), 2, 2) == 4061);
  // 800 ln 160 = 4060.18..
  CHECK(std::ceil(800.0L * std::log(160.0L)) == 4061.0L);
  CHECK(min_samples(Rational(1, 10), Rational(1, 20), Rational(1, 5), 100, 1, BoundVariant::efficiency) == 6814);
  CHECK_THROWS_WITH_AS(min_samples(spec("0.1", "0.05"), Rational(1, 10), 2, 2), doctest::Contains("GAP_NOT_BELOW_THRESHOLD"),
                       Error);
  CHECK_THROWS_AS(min_samples(spec("0.1", "0.05"), Rational(1, 5), 2, 2), Error);
}

TEST_CASE("bound uses alpha in augmented mode") {
  const FairnessSpec aug = FairnessSpec::make(FairnessMetric::ore, Micro::parse("0.1"), Micro::parse("0.05"), Micro::parse("0.2"));
  CHECK(aug.threshold() == Rational(1, 5));
  CHECK(min_samples(aug, Rational(1, 20), 2, 2) == min_samples(Rational(1, 5), Rational(1, 20), Rational(1, 20), 2, 2));
  CHECK(min_samples(aug, Rational(3, 20), 2, 2) == 4061);
}

TEST_CASE("bound monotonicity") {
  const Rational t(1, 10), d(1, 20);
  std::uint64_t prev = UINT64_MAX;
  for (int e = 0; e < 99; e += 3) {
    // larger margin -> fewer samples
    const std::uint64_t v = min_samples(t, Rational(99 - e, 1000), d, 2, 2);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(min_samples(t, Rational(0), Rational(1, 10), 2, 2) <= min_samples(t, Rational(0), Rational(1, 20), 2, 2));
  CHECK(min_samples(t, Rational(0), d, 3, 2) >= min_samples(t, Rational(0), d, 2, 2));
  CHECK(min_samples(t, Rational(0), d, 2, 3) >= min_samples(t, Rational(0), d, 2, 2));
}

TEST_CASE("tail bound closes the union bound") {
  CHECK(std::fabs(static_cast<double>(tail_bound(4061, Rational(1, 40))) - 0.0124) < 0.0001);
  CHECK(4 * tail_bound(4061, Rational(1, 40)) <= 0.05L);
  CHECK(tail_bound(1'000'000, Rational(1, 20)) < 1e-300L);
  CHECK(tail_bound(1, Rational(1, 1'000'000)) == 1.0L);
  CHECK_THROWS(tail_bound(0, Rational(1, 10)));

  CounterPrg prg(77);
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t G = 1 + static_cast<std::uint32_t>(prg.below(20)), Y = 1 + static_cast<std::uint32_t>(prg.below(5));
    const Rational t(1 + static_cast<std::int64_t>(prg.below(500)), 1000);
    const Rational efg = t * Rational(static_cast<std::int64_t>(prg.below(90)), 100);
    const Rational delta(1 + static_cast<std::int64_t>(prg.below(300)), 1000);
    const std::uint64_t m = min_samples(t, efg, delta, G, Y);
    CHECK(G * Y * tail_bound(m, (t - efg) * Rational(1, 2)) <= delta.to_long_double() + 1e-9L);
  }
}

TEST_CASE("decide examples") {
  const FairnessSpec s = spec("0.05", "0.05");
  TestReport r = decide(s, two_group_table(10, 2, 10, 2));
  CHECK_FALSE(r.passed);
  CHECK(r.failure_reason == FailureReason::insufficient_samples);
  CHECK(r.per_group_required == min_samples(s, Rational(0), 2, 2));

  r = decide(s, two_group_table(10, 5, 10, 0));
  CHECK(r.efg == Rational(1, 2));
  CHECK(r.failure_reason == FailureReason::efg_too_large);

  const std::uint64_t need = min_samples(s, Rational(0), 2, 2);
  r = decide(s, two_group_table(need, 0, need, 0));
  CHECK(r.passed);
  CHECK_FALSE(r.failure_reason.has_value());
  r = decide(s, two_group_table(need - 1, 0, need, 0));
  CHECK_FALSE(r.passed);
}

TEST_CASE("boundary gap equal to threshold fails") {
  const FairnessSpec s = spec("0.5", "0.05");
  const TestReport r = decide(s, two_group_table(100'000, 50'000, 100'000, 0));
  CHECK(r.efg == Rational(1, 2));
  CHECK(r.failure_reason == FailureReason::efg_too_large);
}

TEST_CASE("eo uses per-cell counts") {
  const FairnessSpec s = spec("0.1", "0.05", FairnessMetric::eo);
  GroupRiskTable t = two_group_table(10'000, 0, 10'000, 0);
  const TestReport r = decide(s, t);
  CHECK(r.per_group_actual.size() == 4);
  CHECK(r.per_group_actual[0] == 5000);
}

TEST_CASE("decide is monotone in epsilon and delta") {
  CounterPrg prg(31);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t m0 = 500 + prg.below(5000), m1 = 500 + prg.below(5000);
    const GroupRiskTable t = two_group_table(m0, prg.below(m0 / 4), m1, prg.below(m1 / 4));
    const std::uint32_t eps = 10'000 + static_cast<std::uint32_t>(prg.below(300'000));
    const std::uint32_t del = 10'000 + static_cast<std::uint32_t>(prg.below(300'000));
    const auto pass = [&](std::uint32_t e, std::uint32_t d) {
      return decide(FairnessSpec::make(FairnessMetric::ore, Micro{e}, Micro{d}), t).passed;
    };
    if (pass(eps, del)) {
      CHECK(pass(eps + 50'000, del));
      CHECK(pass(eps, del + 50'000));
    }
  }
}

TEST_CASE("spec validation and fairness string") {
  CHECK(spec("0.1", "0.05").fairness_string == "ORE/private");
  CHECK(FairnessSpec::make(FairnessMetric::eo, Micro{1}, Micro{1}, Micro{2}).fairness_string == "EO/augmented");
  CHECK_THROWS(FairnessSpec::make(FairnessMetric::ore, Micro{0}, Micro{50'000}));
  CHECK_THROWS(FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{1'000'000}));
  FairnessSpec s = spec("0.1", "0.05");
  s.fairness_string = "DP/private";
  CHECK_THROWS(s.validate());
  CHECK(parse_metric("Eo") == FairnessMetric::eo);
  CHECK_THROWS(parse_metric("xx"));
}

TEST_CASE("report text and binary forms") {
  const TestReport r = decide(spec("0.1", "0.05"), two_group_table(5000, 500, 5000, 600));
  const std::string text = to_text(r);
  CHECK(text.find("efg=1/50\n") != std::string::npos);
  CHECK(text.find("decision=pass\n") != std::string::npos);
  CHECK(decode_report(encode_report(r)) == r);
  const TestReport f = decide(spec("0.1", "0.05"), two_group_table(50, 0, 50, 0));
  CHECK(decode_report(encode_report(f)) == f);
  Bytes bad = encode_report(f);
  bad.push_back(0);
  CHECK_THROWS(decode_report(bad));
}

}

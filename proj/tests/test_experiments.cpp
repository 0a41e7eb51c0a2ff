#include "doctest.h"

#include <sstream>

#include "faircert/experiments.hpp"

using namespace faircert;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

KnnFixtureConfig small_knn() {
  KnnFixtureConfig c;
  c.per_group = 300;
  c.fresh = 600;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("decimal formatting") {
  CHECK(format_decimal(0.5L) == "0.500000");
  CHECK(format_decimal(1.0L / 3) == "0.333333");
  CHECK(format_decimal(kInfinity) == "inf");
}

TEST_CASE("single-trial coverage") {
  CoverageConfig c;
  c.plant = PlantedConfig::uniform(2, 2, {Micro{200'000}, Micro{200'000}}, 1);
  c.spec = FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{50'000});
  c.trials = 1;
  c.threads = 1;
  const CoverageResult r = run_coverage(c);
  CHECK(r.per_group == 4061);
  CHECK(r.fair_plant);
  REQUIRE(r.rows.size() == 1);
  const auto csv = lines(coverage_csv(r));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "trial,true_gap,efg,decision");
  CHECK(csv[1].rfind("0,0.000000,", 0) == 0);
  CHECK(csv[2].rfind("summary,", 0) == 0);
  CHECK(csv[2].find("certification_rate=") != std::string::npos);
}

TEST_CASE("coverage is reproducible and thread-independent") {
  CoverageConfig c;
  c.plant = PlantedConfig::uniform(2, 2, {Micro{100'000}, Micro{250'000}}, 2);
  c.spec = FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{50'000});
  c.trials = 12;
  c.per_group = 2000;
  c.threads = 1;
  const std::string one = coverage_csv(run_coverage(c));
  c.threads = 4;
  CHECK(coverage_csv(run_coverage(c)) == one);
  const CoverageResult r = run_coverage(c);
  CHECK_FALSE(r.fair_plant);
  CHECK(r.certified() == 0);
  CHECK(lines(one).back().find("false_certification_rate=0.000000") != std::string::npos);
}

TEST_CASE("augmented coverage") {
  CoverageConfig c;
  c.plant = PlantedConfig::uniform(2, 2, {Micro{200'000}, Micro{200'000}}, 3);
  c.spec = FairnessSpec::make(FairnessMetric::ore, Micro{100'000}, Micro{50'000}, Micro{100'000});
  AugmentorConfig a;
  a.noise_sigma = Q16::from_double(0.25);
  c.augmentor = a;
  c.trials = 3;
  c.threads = 2;
  const CoverageResult r = run_coverage(c);
  CHECK(r.rows.size() == 3);
  CHECK(r.certified() == 3);
}

TEST_CASE("knn sweep endpoints") {
  const KnnAttackSetup s = knn_fixture(small_knn());
  const KnnAttackResult r = run_knn_attack(s);
  REQUIRE(r.rows.size() == default_tau_grid().size());
  const KnnRow& first = r.rows.front();
  const KnnRow& last = r.rows.back();
  CHECK(first.tau == 0.0);
  // tau = 0 routes (almost) everything to the unfair model
  CHECK(first.routed > Rational(99, 100));
  CHECK(first.efg == r.unfair_efg);
  CHECK(last.tau == kInfinity);
  CHECK(last.routed == Rational(0));
  CHECK(last.efg == r.fair_efg);
  CHECK(last.accuracy == r.fair_accuracy);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].routed <= r.rows[i - 1].routed);
  CHECK(r.unfair_accuracy > r.fair_accuracy);
  CHECK(r.unfair_efg > r.fair_efg);
}

TEST_CASE("knn csv is byte-stable") {
  const std::string a = knn_csv(run_knn_attack(knn_fixture(small_knn())));
  const std::string b = knn_csv(run_knn_attack(knn_fixture(small_knn())));
  CHECK(a == b);
  const auto l = lines(a);
  CHECK(l.front() == "tau,accuracy,efg,routed_fraction");
  CHECK(l.back().rfind("inf,", 0) == 0);
  KnnFixtureConfig other = small_knn();
  other.seed = 1;
  CHECK(knn_csv(run_knn_attack(knn_fixture(other))) != a);
}

TEST_CASE("nearest distances") {
  Dataset ref{2, 1, 1, {Sample{{Q16::from_int(0), Q16::from_int(0)}, 0, 0}, Sample{{Q16::from_int(3), Q16::from_int(4)}, 0, 0}}};
  Dataset q{2, 1, 1, {Sample{{Q16::from_int(3), Q16::from_int(5)}, 0, 0}, Sample{{Q16::from_int(-3), Q16::from_int(-4)}, 0, 0}}};
  const auto d = nearest_distances(q, ref);
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(5.0));
}

TEST_CASE("attack success predicate") {
  KnnAttackResult r;
  r.fair_efg = Rational(1, 100);
  r.unfair_accuracy = Rational(88, 100);
  r.rows.push_back(KnnRow{0.5, Rational(80, 100), Rational(1, 100), Rational(0)});
  CHECK_FALSE(attack_succeeds(r));
  r.rows.push_back(KnnRow{0.6, Rational(875, 1000), Rational(15, 1000), Rational(1, 2)});
  CHECK(attack_succeeds(r));
}

TEST_CASE("augment sweep shape") {
  AugmentSweepConfig c;
  c.per_group = 500;
  const auto rows = run_augment_sweep(c);
  REQUIRE(rows.size() == 5);
  const auto csv = lines(augment_sweep_csv(rows));
  REQUIRE(csv.size() == 6);
  CHECK(csv[0] == "degree,fair_accuracy,fair_efg,unfair_accuracy,unfair_efg");
  CHECK(csv[1].rfind("0.000000,", 0) == 0);
  // no augmentation: the planted rates show through
  CHECK(rows[0].unfair_accuracy > rows[0].fair_accuracy);
  CHECK(augment_sweep_csv(run_augment_sweep(c)) == augment_sweep_csv(rows));
}

}

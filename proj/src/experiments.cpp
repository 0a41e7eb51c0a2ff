#include "faircert/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "faircert/prg.hpp"

namespace faircert {

std::string format_decimal(long double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6Lf", value);
  return buf;
}

Rational planted_gap(const TrueGaps& gaps, FairnessMetric metric) {
  switch (metric) {
    case FairnessMetric::ore: return gaps.ore;
    case FairnessMetric::eo: return gaps.eo;
    case FairnessMetric::dp: return gaps.dp;
  }
  return gaps.ore;
}

Rational accuracy(const Dataset& data, std::span<const LabelId> predictions) {
  require(data.samples.size() == predictions.size(), ErrorCode::length_mismatch, "predictions vs samples");
  require(!data.samples.empty(), ErrorCode::empty_input, "accuracy of an empty set");
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == data.samples[i].label;
  return Rational(correct, static_cast<std::int64_t>(predictions.size()));
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::uint32_t CoverageResult::certified() const {
  return static_cast<std::uint32_t>(std::count_if(rows.begin(), rows.end(), [](const CoverageRow& r) { return r.certified; }));
}

double CoverageResult::certification_rate() const {
  return rows.empty() ? 0.0 : static_cast<double>(certified()) / static_cast<double>(rows.size());
}

CoverageResult run_coverage(const CoverageConfig& cfg) {
  cfg.plant.validate();
  cfg.spec.validate();
  require(cfg.trials >= 1, ErrorCode::invalid_argument, "trials must be at least 1");
  const bool augmented = cfg.spec.mode() == TestMode::augmented;
  require(cfg.augmentor.has_value() == augmented, ErrorCode::invalid_argument,
          "augmentor must be configured exactly in augmented mode");

  CoverageResult result;
  result.true_gap = planted_gap(true_gaps(cfg.plant), cfg.spec.metric);
  result.fair_plant = result.true_gap < cfg.spec.threshold();
  result.per_group = cfg.per_group ? *cfg.per_group
                                   : min_samples(cfg.spec, cfg.spec.threshold() * Rational(1, 2), cfg.plant.num_groups,
                                                 cfg.plant.num_labels, cfg.variant);
  require(result.per_group >= 1, ErrorCode::invalid_argument, "per-group size must be positive");

  const ModelSpec model = planted_model(cfg.plant);
  const std::uint64_t data_key = derive_seed(cfg.plant.seed, "data");
  const std::uint64_t aug_key = derive_seed(cfg.plant.seed, "augmentor");
  result.rows.resize(cfg.trials);

  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    CoverageRow& row = result.rows[i];
    row.trial = static_cast<std::uint32_t>(i);
    Dataset data = draw_planted_per_group(cfg.plant, result.per_group, combine(data_key, i));
    if (augmented) {
      AugmentorConfig aug = *cfg.augmentor;
      aug.master_seed = combine(aug_key, i);
      data = augment_dataset(aug, data);
    }
    const std::vector<LabelId> predictions = predict_all(model, data);
    try {
      const TestReport report = decide(cfg.spec, build_risk_table(data, predictions));
      row.efg = report.efg;
      row.certified = report.passed;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_cell) throw;
      row.note = "EMPTY_CELL";
    }
  });
  return result;
}

std::string coverage_csv(const CoverageResult& result) {
  std::ostringstream out;
  const std::string gap = format_decimal(result.true_gap.to_long_double());
  out << "trial,true_gap,efg,decision\n";
  long double efg_sum = 0;
  for (const CoverageRow& r : result.rows) {
    efg_sum += r.efg.to_long_double();
    out << r.trial << ',' << gap << ',' << (r.note.empty() ? format_decimal(r.efg.to_long_double()) : "") << ','
        << (r.note.empty() ? (r.certified ? "certified" : "rejected") : r.note) << '\n';
  }
  const long double mean = result.rows.empty() ? 0 : efg_sum / static_cast<long double>(result.rows.size());
  out << "summary," << gap << ',' << format_decimal(mean) << ','
      << (result.fair_plant ? "certification_rate=" : "false_certification_rate=")
      << format_decimal(result.certification_rate()) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<double> default_tau_grid() {
  std::vector<double> taus;
  for (int i = 0; i <= 40; ++i) taus.push_back(i * 0.05);
  taus.push_back(kInfinity);
  return taus;
}

namespace {

PlantedConfig two_group_plant(std::uint64_t seed, std::vector<Micro> rates) {
  const auto groups = static_cast<std::uint32_t>(rates.size());
  return PlantedConfig::uniform(groups, 2, std::move(rates), seed);
}

}  // namespace

KnnAttackSetup knn_fixture(const KnnFixtureConfig& cfg) {
  require(cfg.fair_rates.size() == cfg.unfair_rates.size(), ErrorCode::dimension_mismatch, "rate vectors differ in length");
  const PlantedConfig fair_plant = two_group_plant(derive_seed(cfg.seed, "fair"), cfg.fair_rates);
  const PlantedConfig unfair_plant = two_group_plant(derive_seed(cfg.seed, "unfair"), cfg.unfair_rates);

  const Dataset public_test = draw_planted_per_group(fair_plant, cfg.per_group, derive_seed(cfg.seed, "data"));
  AugmentorConfig aug;
  aug.noise_sigma = cfg.noise_sigma;
  aug.mask_prob = cfg.mask_prob;
  aug.master_seed = derive_seed(cfg.seed, "attack");
  Dataset reference = augment_dataset(aug, public_test);
  aug.master_seed = derive_seed(cfg.seed, "augmentor");
  Dataset test = augment_dataset(aug, public_test);
  Dataset fresh = draw_planted(fair_plant, cfg.fresh, derive_seed(cfg.seed, "fresh"));

  return KnnAttackSetup{planted_model(fair_plant), planted_model(unfair_plant), std::move(reference), std::move(test),
                        std::move(fresh), FairnessMetric::ore, cfg.taus.empty() ? default_tau_grid() : cfg.taus};
}

std::vector<double> nearest_distances(const Dataset& queries, const Dataset& reference) {
  require(queries.dimension == reference.dimension, ErrorCode::dimension_mismatch, "query and reference dimensions differ");
  require(!reference.samples.empty(), ErrorCode::empty_input, "empty reference set");
  std::vector<double> out(queries.samples.size());
  parallel_for(queries.samples.size(), 0, [&](std::size_t i) {
    const auto& q = queries.samples[i].features;
    double best = kInfinity;
    for (const Sample& r : reference.samples) {
      double sum = 0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double d = static_cast<double>(q[k].raw()) - static_cast<double>(r.features[k].raw());
        sum += d * d;
        if (sum >= best) break;
      }
      best = std::min(best, sum);
    }
    out[i] = std::sqrt(best) / static_cast<double>(Q16::kOne);
  });
  return out;
}

KnnAttackResult run_knn_attack(const KnnAttackSetup& s) {
  require(s.fair.dimension() == s.unfair.dimension(), ErrorCode::dimension_mismatch, "models differ in dimension");
  require(s.fair.dimension() == s.test.dimension && s.fair.dimension() == s.fresh.dimension, ErrorCode::dimension_mismatch,
          "model and data dimensions differ");
  const std::vector<double> test_dist = nearest_distances(s.test, s.reference);
  const std::vector<double> fresh_dist = nearest_distances(s.fresh, s.reference);
  const std::vector<LabelId> test_fair = predict_all(s.fair, s.test), test_unfair = predict_all(s.unfair, s.test);
  const std::vector<LabelId> fresh_fair = predict_all(s.fair, s.fresh), fresh_unfair = predict_all(s.unfair, s.fresh);

  KnnAttackResult result;
  result.fair_efg = empirical_gap(build_risk_table(s.test, test_fair), s.metric);
  result.unfair_efg = empirical_gap(build_risk_table(s.test, test_unfair), s.metric);
  result.fair_accuracy = accuracy(s.fresh, fresh_fair);
  result.unfair_accuracy = accuracy(s.fresh, fresh_unfair);

  std::vector<LabelId> hybrid_test(test_fair.size()), hybrid_fresh(fresh_fair.size());
  for (double tau : s.taus) {
    std::int64_t routed = 0;
    for (std::size_t i = 0; i < hybrid_test.size(); ++i) hybrid_test[i] = test_dist[i] <= tau ? test_fair[i] : test_unfair[i];
    for (std::size_t i = 0; i < hybrid_fresh.size(); ++i) {
      const bool to_unfair = !(fresh_dist[i] <= tau);
      routed += to_unfair;
      hybrid_fresh[i] = to_unfair ? fresh_unfair[i] : fresh_fair[i];
    }
    result.rows.push_back(KnnRow{tau, accuracy(s.fresh, hybrid_fresh),
                                 empirical_gap(build_risk_table(s.test, hybrid_test), s.metric),
                                 Rational(routed, static_cast<std::int64_t>(hybrid_fresh.size()))});
  }
  return result;
}

std::string knn_csv(const KnnAttackResult& result) {
  std::ostringstream out;
  out << "tau,accuracy,efg,routed_fraction\n";
  for (const KnnRow& r : result.rows)
    out << format_decimal(r.tau) << ',' << format_decimal(r.accuracy.to_long_double()) << ','
        << format_decimal(r.efg.to_long_double()) << ',' << format_decimal(r.routed.to_long_double()) << '\n';
  return out.str();
}

bool attack_succeeds(const KnnAttackResult& result, double slack) {
  for (const KnnRow& r : result.rows) {
    const bool fair_level = std::fabs(static_cast<double>((r.efg - result.fair_efg).to_long_double())) <= slack;
    const bool accurate = std::fabs(static_cast<double>((r.accuracy - result.unfair_accuracy).to_long_double())) <= slack;
    if (fair_level && accurate) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

std::vector<AugmentSweepRow> run_augment_sweep(const AugmentSweepConfig& cfg) {
  const PlantedConfig fair_plant = two_group_plant(derive_seed(cfg.seed, "fair"), cfg.fair_rates);
  const PlantedConfig unfair_plant = two_group_plant(derive_seed(cfg.seed, "unfair"), cfg.unfair_rates);
  const ModelSpec fair = planted_model(fair_plant), unfair = planted_model(unfair_plant);
  const Dataset base = draw_planted_per_group(fair_plant, cfg.per_group, derive_seed(cfg.seed, "data"));

  std::vector<AugmentSweepRow> rows;
  for (Micro degree : cfg.degrees) {
    AugmentorConfig aug;
    aug.master_seed = derive_seed(cfg.seed, "augmentor");
    aug.noise_sigma = cfg.noise_sigma;
    aug.mask_prob = cfg.mask_prob;
    aug.degree = degree;
    const Dataset data = augment_dataset(aug, base);
    const std::vector<LabelId> pf = predict_all(fair, data), pu = predict_all(unfair, data);
    rows.push_back(AugmentSweepRow{degree, accuracy(data, pf), empirical_gap(build_risk_table(data, pf), cfg.metric),
                                   accuracy(data, pu), empirical_gap(build_risk_table(data, pu), cfg.metric)});
  }
  return rows;
}

std::string augment_sweep_csv(const std::vector<AugmentSweepRow>& rows) {
  std::ostringstream out;
  out << "degree,fair_accuracy,fair_efg,unfair_accuracy,unfair_efg\n";
  for (const AugmentSweepRow& r : rows)
    out << format_decimal(r.degree.to_double()) << ',' << format_decimal(r.fair_accuracy.to_long_double()) << ','
        << format_decimal(r.fair_efg.to_long_double()) << ',' << format_decimal(r.unfair_accuracy.to_long_double()) << ','
        << format_decimal(r.unfair_efg.to_long_double()) << '\n';
  return out.str();
}

}  // namespace faircert

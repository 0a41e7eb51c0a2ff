#include "doctest.h"

#include <cmath>

#include "faircert/error.hpp"
#include "faircert/fairness.hpp"
#include "faircert/model.hpp"
#include "faircert/planted.hpp"
#include "faircert/prg.hpp"

using namespace faircert;

namespace {

std::vector<Q16> vec(std::initializer_list<double> v) {
  std::vector<Q16> out;
  for (double d : v) out.push_back(Q16::from_double(d));
  return out;
}

ModelSpec golden_linear() { return ModelSpec::linear(2, 2, vec({1, 0, 0, 1}), vec({0, 0.5})); }

std::vector<ModelSpec> sample_models() {
  return {
      golden_linear(),
      ModelSpec::zero_linear(3, 4),
      ModelSpec::lookup(2, 3, 2, {{vec({1, 2}), 0}, {vec({-1, 0.5}), 1}}),
      ModelSpec::biased(golden_linear(), {Micro{100'000}, Micro{250'000}}, 99),
      ModelSpec::biased(ModelSpec::biased(ModelSpec::zero_linear(1, 2), {Micro{1}}, 1), {Micro{2}}, 2),
  };
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("zero model predicts label 0") {
  const ModelSpec m = ModelSpec::zero_linear(4, 3);
  CounterPrg prg(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<Q16> x(4);
    for (Q16& q : x) q = Q16::from_raw(static_cast<std::int32_t>(prg.next_u64()));
    CHECK(predict(m, x, 0) == 0);
  }
  CHECK(m.weight_count() == 15);
}

TEST_CASE("unit weight on the first coordinate") {
  // w_0 = 0, w_1 = e_1
  const ModelSpec m = ModelSpec::linear(3, 2, vec({0, 0, 0, 1, 0, 0}), vec({0, 0}));
  CHECK(predict(m, vec({1, 0, 0}), 0) == 1);
  CHECK(predict(m, vec({-1, 0, 0}), 0) == 0);
  CHECK(predict(m, vec({0, 5, 5}), 0) == 0);  // tie goes to the lower label
  CHECK_THROWS_WITH_AS(predict(m, vec({1, 0}), 0), doctest::Contains("DIMENSION_MISMATCH"), Error);
}

TEST_CASE("linear scores accumulate wide and saturate once") {
  const ModelSpec m = ModelSpec::linear(2, 1, {Q16::max(), Q16::max()}, vec({0}));
  const auto s = linear_scores(m, std::vector<Q16>{Q16::max(), Q16::min()});
  // max*max + max*min = max*(max+min) = max*(-1 raw), tiny negative
  CHECK(s[0].raw() < 0);
  CHECK(s[0].raw() > -65536);
}

TEST_CASE("lookup table") {
  const ModelSpec m = ModelSpec::lookup(2, 3, 2, {{vec({1, 2}), 0}, {vec({-1, 0.5}), 1}});
  CHECK(predict(m, vec({1, 2}), 0) == 0);
  CHECK(predict(m, vec({-1, 0.5}), 1) == 1);
  CHECK(predict(m, vec({1, 2.5}), 0) == 2);
  CHECK_THROWS(ModelSpec::lookup(2, 2, 5, {}));
  CHECK_THROWS(ModelSpec::lookup(2, 2, 0, {{vec({1}), 0}}));
}

TEST_CASE("wrapper with zero rates is the identity") {
  const ModelSpec inner = golden_linear();
  const ModelSpec w = ModelSpec::biased(inner, {Micro{0}, Micro{0}}, 1234);
  CounterPrg prg(8);
  for (int i = 0; i < 1000; ++i) {
    const auto x = std::vector<Q16>{Q16::from_raw(static_cast<std::int32_t>(prg.below(1 << 20)) - (1 << 19)),
                                    Q16::from_raw(static_cast<std::int32_t>(prg.below(1 << 20)) - (1 << 19))};
    const auto g = static_cast<GroupId>(prg.below(2));
    CHECK(predict(w, x, g) == predict(inner, x, g));
  }
}

TEST_CASE("wrapper with full rate always flips and is deterministic") {
  const ModelSpec inner = golden_linear();
  const ModelSpec w = ModelSpec::biased(inner, {Micro{kMicroScale}, Micro{0}}, 7);
  const auto x = vec({2, 0});
  CHECK(predict(w, x, 0) != predict(inner, x, 0));
  CHECK(predict(w, x, 1) == predict(inner, x, 1));
  CHECK(predict(w, x, 0) == predict(w, x, 0));
  CHECK_THROWS_WITH_AS(predict(w, x, 2), doctest::Contains("ID_OUT_OF_RANGE"), Error);
}

TEST_CASE("serialization is canonical") {
  for (const ModelSpec& m : sample_models()) {
    const Bytes a = serialize_model(m), b = serialize_model(m);
    CHECK(a == b);
    CHECK(deserialize_model(a) == m);
    CHECK(serialize_model(deserialize_model(a)) == a);
  }
}

TEST_CASE("one weight bit changes the bytes") {
  const ModelSpec a = golden_linear();
  auto w = vec({1, 0, 0, 1});
  w[2] = Q16::from_raw(w[2].raw() ^ 1);
  const ModelSpec b = ModelSpec::linear(2, 2, w, vec({0, 0.5}));
  const Bytes sa = serialize_model(a), sb = serialize_model(b);
  REQUIRE(sa.size() == sb.size());
  int diff = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) diff += __builtin_popcount(sa[i] ^ sb[i]);
  CHECK(diff == 1);
}

TEST_CASE("golden 2x2 linear fixture") {
  const Bytes golden = read_file(std::string(FIXTURE_DIR) + "/linear_2x2.bin");
  CHECK(serialize_model(golden_linear()) == golden);
  CHECK(deserialize_model(golden) == golden_linear());
}

TEST_CASE("malformed model bytes") {
  const Bytes good = serialize_model(sample_models()[3]);
  CHECK_THROWS_WITH_AS(deserialize_model(Bytes{}), doctest::Contains("MALFORMED_MODEL"), Error);
  for (std::size_t cut = 0; cut < good.size(); ++cut) {
    const Bytes part(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    CHECK_THROWS_AS(deserialize_model(part), Error);
  }
  Bytes longer = good;
  longer.push_back(0);
  CHECK_THROWS_WITH_AS(deserialize_model(longer), doctest::Contains("MALFORMED_MODEL"), Error);
  Bytes arch = good;
  arch[6] = 9;
  CHECK_THROWS_WITH_AS(deserialize_model(arch), doctest::Contains("MALFORMED_MODEL"), Error);
  Bytes magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_model(magic), Error);
  Bytes rate = serialize_model(ModelSpec::biased(golden_linear(), {Micro{1}}, 0));
  // flip rate sits right after the inner model and the group count
  const std::size_t off = serialize_model(golden_linear()).size() + 4 + 7 + 8;
  rate[off + 2] = 0xff;
  CHECK_THROWS_AS(deserialize_model(rate), Error);
}

TEST_CASE("planted base model is exact") {
  const PlantedConfig c = PlantedConfig::uniform(3, 3, {Micro{0}, Micro{0}, Micro{0}}, 11);
  const Dataset d = draw_planted(c, 3000, 1);
  const auto pred = predict_all(planted_base_model(c), d);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(pred[i] == d.samples[i].label);
}

TEST_CASE("planted error rates and gaps") {
  const PlantedConfig c = PlantedConfig::uniform(2, 2, {Micro{100'000}, Micro{250'000}}, 3);
  const TrueGaps g = true_gaps(c);
  CHECK(g.ore == Rational(15, 100));
  CHECK(g.eo == Rational(15, 100));
  const std::size_t m = 20'000;
  const Dataset d = draw_planted_per_group(c, m, 42);
  const GroupRiskTable t = build_risk_table(d, predict_all(planted_model(c), d));
  const double tol = 3 * std::sqrt(0.25 / m);
  CHECK(t.m_g[0] == m);
  CHECK(t.m_g[1] == m);
  CHECK(std::fabs(static_cast<double>(t.err_g[0]) / m - 0.10) < tol);
  CHECK(std::fabs(static_cast<double>(t.err_g[1]) / m - 0.25) < tol);
  CHECK(std::fabs(static_cast<double>(empirical_gap(t, FairnessMetric::ore).to_long_double()) - 0.15) < 2 * tol);
}

TEST_CASE("planted cell frequencies pass chi-square") {
  PlantedConfig c = PlantedConfig::uniform(2, 2, {Micro{0}, Micro{0}}, 9);
  c.weights = {Micro{100'000}, Micro{200'000}, Micro{300'000}, Micro{400'000}};
  const std::size_t m = 50'000;
  const Dataset d = draw_planted(c, m, 77);
  double counts[4] = {};
  for (const Sample& s : d.samples) counts[s.group * 2 + s.label] += 1;
  double chi2 = 0;
  for (int i = 0; i < 4; ++i) {
    const double expected = m * c.weights[static_cast<std::size_t>(i)].to_double();
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  CHECK(chi2 < 16.27);  // 3 dof, p = 0.001
}

TEST_CASE("planted config validation and json") {
  PlantedConfig c = PlantedConfig::uniform(2, 2, {Micro{100'000}, Micro{200'000}}, 5);
  CHECK_NOTHROW(c.validate());
  const PlantedConfig back = parse_planted_config(planted_config_to_json(c));
  CHECK(back.weights == c.weights);
  CHECK(back.error_rates == c.error_rates);
  CHECK(back.seed == c.seed);
  c.weights[0].units += 1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("INVALID_WEIGHTS"), Error);
  CHECK_THROWS(parse_planted_config("{\"groups\": 2"));
  const PlantedConfig u = parse_planted_config(R"({"groups":2,"labels":2,"weights":"uniform","error_rates":["0.1","0.2"],"seed":4})");
  CHECK(u.error_rates[1] == Micro{200'000});
}

TEST_CASE("planted draws are seed-deterministic") {
  const PlantedConfig c = PlantedConfig::uniform(2, 2, {Micro{100'000}, Micro{200'000}}, 5);
  CHECK(draw_planted(c, 500, 1) == draw_planted(c, 500, 1));
  CHECK_FALSE(draw_planted(c, 500, 1) == draw_planted(c, 500, 2));
}

}

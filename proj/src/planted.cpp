#include "faircert/planted.hpp"

#include "json.hpp"

#include "faircert/prg.hpp"

namespace faircert {

namespace {

constexpr std::int32_t kNoiseRaw = 58982;      // 0.9 in Q16.16
constexpr std::int32_t kCenterRaw = 2 * 65536;  // 2.0

std::uint64_t group_weight(const PlantedConfig& c, GroupId g) {
  std::uint64_t w = 0;
  for (LabelId y = 0; y < c.num_labels; ++y) w += c.weights[std::size_t{g} * c.num_labels + y].units;
  return w;
}

Sample draw_features(const PlantedConfig& c, GroupId g, LabelId y, CounterPrg& prg) {
  Sample s;
  s.group = g;
  s.label = y;
  s.features.resize(c.dimension);
  for (std::uint32_t j = 0; j < c.dimension; ++j) {
    auto raw = static_cast<std::int32_t>(prg.below(2 * kNoiseRaw + 1)) - kNoiseRaw;
    if (j == y) raw += kCenterRaw;
    s.features[j] = Q16::from_raw(raw);
  }
  return s;
}

std::vector<Micro> uniform_weights(std::uint32_t groups, std::uint32_t labels) {
  const std::uint32_t cells = groups * labels;
  require(cells > 0, ErrorCode::invalid_argument, "need at least one group and one label");
  std::vector<Micro> w(cells, Micro{kMicroScale / cells});
  w.back().units += kMicroScale - (kMicroScale / cells) * cells;
  return w;
}

// Picks index i with probability weights[i] / total.
std::size_t pick(std::span<const Micro> weights, std::uint64_t total, CounterPrg& prg) {
  std::uint64_t u = prg.below(total);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i].units) return i;
    u -= weights[i].units;
  }
  return weights.size() - 1;
}

}  // namespace

void PlantedConfig::validate() const {
  require(num_groups >= 1 && num_labels >= 2, ErrorCode::invalid_argument, "need >= 1 group and >= 2 labels");
  require(dimension >= num_labels, ErrorCode::invalid_argument, "dimension must be at least the label count");
  require(weights.size() == std::size_t{num_groups} * num_labels, ErrorCode::invalid_weights, "weight table shape");
  require(error_rates.size() == num_groups, ErrorCode::invalid_argument, "one error rate per group");
  std::uint64_t sum = 0;
  for (Micro w : weights) sum += w.units;
  require(sum == kMicroScale, ErrorCode::invalid_weights, "weights sum to " + Micro{static_cast<std::uint32_t>(sum)}.to_string() + ", not 1");
  for (GroupId g = 0; g < num_groups; ++g)
    require(group_weight(*this, g) > 0, ErrorCode::invalid_weights, "group " + std::to_string(g) + " has zero weight");
  for (Micro e : error_rates) require(e.in_closed_unit_interval(), ErrorCode::invalid_argument, "error rate outside [0,1]");
}

PlantedConfig PlantedConfig::uniform(std::uint32_t groups, std::uint32_t labels, std::vector<Micro> error_rates,
                                     std::uint64_t seed, std::uint32_t dimension) {
  PlantedConfig c;
  c.dimension = dimension;
  c.num_groups = groups;
  c.num_labels = labels;
  c.weights = uniform_weights(groups, labels);
  c.error_rates = std::move(error_rates);
  c.seed = seed;
  c.validate();
  return c;
}

TrueGaps true_gaps(const PlantedConfig& c) {
  c.validate();
  TrueGaps gaps{Rational(0), Rational(0), Rational(0)};
  std::vector<Rational> risk;
  for (Micro e : c.error_rates) risk.push_back(e.to_rational());
  // Flips are independent of the label, so every (g, y) cell has risk e_g and EO equals ORE.
  for (std::size_t a = 0; a < risk.size(); ++a)
    for (std::size_t b = a + 1; b < risk.size(); ++b) gaps.ore = std::max(gaps.ore, (risk[a] - risk[b]).abs());
  gaps.eo = gaps.ore;

  // P(yhat = y | g) = P(y|g)(1 - e_g) + (1 - P(y|g)) e_g / (|Y| - 1)
  const Rational others(1, c.num_labels - 1);
  for (LabelId y = 0; y < c.num_labels; ++y) {
    std::vector<Rational> likelihood;
    for (GroupId g = 0; g < c.num_groups; ++g) {
      const Rational p(c.weights[std::size_t{g} * c.num_labels + y].units, static_cast<std::int64_t>(group_weight(c, g)));
      const Rational e = c.error_rates[g].to_rational();
      likelihood.push_back(p * (Rational(1) - e) + (Rational(1) - p) * e * others);
    }
    for (std::size_t a = 0; a < likelihood.size(); ++a)
      for (std::size_t b = a + 1; b < likelihood.size(); ++b)
        gaps.dp = std::max(gaps.dp, (likelihood[a] - likelihood[b]).abs());
  }
  return gaps;
}

ModelSpec planted_base_model(const PlantedConfig& c) {
  c.validate();
  std::vector<Q16> weights(std::size_t{c.dimension} * c.num_labels);
  for (LabelId y = 0; y < c.num_labels; ++y) weights[std::size_t{y} * c.dimension + y] = Q16::from_int(1);
  return ModelSpec::linear(c.dimension, c.num_labels, std::move(weights), std::vector<Q16>(c.num_labels));
}

ModelSpec planted_model(const PlantedConfig& c) {
  return ModelSpec::biased(planted_base_model(c), c.error_rates, derive_seed(c.seed, "model"));
}

Dataset draw_planted(const PlantedConfig& c, std::size_t m, std::uint64_t data_seed) {
  c.validate();
  Dataset data{c.dimension, c.num_groups, c.num_labels, {}};
  data.samples.reserve(m);
  CounterPrg prg(data_seed, 0x1D);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t cell = pick(c.weights, kMicroScale, prg);
    data.samples.push_back(draw_features(c, static_cast<GroupId>(cell / c.num_labels),
                                         static_cast<LabelId>(cell % c.num_labels), prg));
  }
  return data;
}

Dataset draw_planted_per_group(const PlantedConfig& c, std::size_t per_group, std::uint64_t data_seed) {
  c.validate();
  Dataset data{c.dimension, c.num_groups, c.num_labels, {}};
  data.samples.reserve(per_group * c.num_groups);
  CounterPrg prg(data_seed, 0x5A);
  for (GroupId g = 0; g < c.num_groups; ++g) {
    const std::span<const Micro> row(c.weights.data() + std::size_t{g} * c.num_labels, c.num_labels);
    const std::uint64_t total = group_weight(c, g);
    for (std::size_t i = 0; i < per_group; ++i)
      data.samples.push_back(draw_features(c, g, static_cast<LabelId>(pick(row, total, prg)), prg));
  }
  return data;
}

PlantedDraw generate_planted(const PlantedConfig& c, std::size_t m) {
  require(m >= 1, ErrorCode::invalid_argument, "m must be positive");
  return PlantedDraw{draw_planted(c, m, derive_seed(c.seed, "data")), planted_model(c), true_gaps(c)};
}

namespace {

Micro json_micro(const nlohmann::json& v) {
  if (v.is_string()) return Micro::parse(v.get<std::string>());
  require(v.is_number(), ErrorCode::invalid_argument, "expected a number");
  return Micro::from_double(v.get<double>());
}

}  // namespace

PlantedConfig parse_planted_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("planted config: ") + e.what());
  }
  PlantedConfig c;
  try {
    c.dimension = j.value("dimension", 4u);
    c.num_groups = j.at("groups").get<std::uint32_t>();
    c.num_labels = j.at("labels").get<std::uint32_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    const auto& w = j.at("weights");
    if (w.is_string() && w.get<std::string>() == "uniform") {
      require(c.num_groups >= 1 && c.num_labels >= 1, ErrorCode::invalid_argument, "cardinalities");
      c.weights = uniform_weights(c.num_groups, c.num_labels);
    } else {
      for (const auto& row : w) {
        if (row.is_array()) {
          for (const auto& v : row) c.weights.push_back(json_micro(v));
        } else {
          c.weights.push_back(json_micro(row));
        }
      }
    }
    for (const auto& e : j.at("error_rates")) c.error_rates.push_back(json_micro(e));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("planted config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string planted_config_to_json(const PlantedConfig& c) {
  nlohmann::json j;
  j["dimension"] = c.dimension;
  j["groups"] = c.num_groups;
  j["labels"] = c.num_labels;
  j["seed"] = c.seed;
  nlohmann::json rows = nlohmann::json::array();
  for (GroupId g = 0; g < c.num_groups; ++g) {
    nlohmann::json row = nlohmann::json::array();
    for (LabelId y = 0; y < c.num_labels; ++y) row.push_back(c.weights[std::size_t{g} * c.num_labels + y].to_string());
    rows.push_back(row);
  }
  j["weights"] = rows;
  nlohmann::json rates = nlohmann::json::array();
  for (Micro e : c.error_rates) rates.push_back(e.to_string());
  j["error_rates"] = rates;
  return j.dump(2);
}

}  // namespace faircert

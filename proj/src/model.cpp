#include "faircert/model.hpp"

#include <cstring>

#include "faircert/prg.hpp"

namespace faircert {

namespace {

constexpr std::string_view kModelMagic = "FAIRM1";

std::uint64_t hash_input(std::span<const Q16> features, GroupId group) {
  std::uint64_t h = mix64(0x46414952ULL + features.size());
  for (Q16 f : features) h = combine(h, static_cast<std::uint32_t>(f.raw()));
  return combine(h, group);
}

}  // namespace

bool operator==(const BiasedParams& a, const BiasedParams& b) {
  const bool inner_equal = (a.inner && b.inner) ? (*a.inner == *b.inner) : (a.inner == b.inner);
  return inner_equal && a.flip_rates == b.flip_rates && a.seed == b.seed;
}

ModelSpec ModelSpec::linear(std::uint32_t dimension, std::uint32_t num_labels, std::vector<Q16> weights,
                            std::vector<Q16> bias) {
  ModelSpec m(dimension, num_labels, LinearParams{std::move(weights), std::move(bias)});
  m.validate();
  return m;
}

ModelSpec ModelSpec::zero_linear(std::uint32_t dimension, std::uint32_t num_labels) {
  return linear(dimension, num_labels, std::vector<Q16>(std::size_t{dimension} * num_labels), std::vector<Q16>(num_labels));
}

ModelSpec ModelSpec::lookup(std::uint32_t dimension, std::uint32_t num_labels, LabelId default_label,
                            std::vector<LookupEntry> entries) {
  ModelSpec m(dimension, num_labels, LookupParams{default_label, std::move(entries)});
  m.validate();
  return m;
}

ModelSpec ModelSpec::biased(ModelSpec inner, std::vector<Micro> flip_rates, std::uint64_t seed) {
  const std::uint32_t dim = inner.dimension();
  const std::uint32_t labels = inner.num_labels();
  ModelSpec m(dim, labels, BiasedParams{std::make_shared<const ModelSpec>(std::move(inner)), std::move(flip_rates), seed});
  m.validate();
  return m;
}

void ModelSpec::validate() const {
  require(num_labels_ >= 1, ErrorCode::malformed_model, "model needs at least one label");
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          require(p.weights.size() == std::size_t{dimension_} * num_labels_, ErrorCode::malformed_model,
                  "weight block size");
          require(p.bias.size() == num_labels_, ErrorCode::malformed_model, "bias size");
        } else if constexpr (std::is_same_v<P, LookupParams>) {
          require(p.default_label < num_labels_, ErrorCode::malformed_model, "default label");
          for (const LookupEntry& e : p.entries) {
            require(e.key.size() == dimension_, ErrorCode::malformed_model, "lookup key dimension");
            require(e.label < num_labels_, ErrorCode::malformed_model, "lookup label");
          }
        } else {
          require(p.inner != nullptr, ErrorCode::malformed_model, "wrapper without inner model");
          require(p.inner->dimension() == dimension_ && p.inner->num_labels() == num_labels_,
                  ErrorCode::malformed_model, "wrapper shape");
          for (Micro r : p.flip_rates) require(r.in_closed_unit_interval(), ErrorCode::malformed_model, "flip rate");
        }
      },
      params_);
}

std::size_t ModelSpec::weight_count() const noexcept {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          return p.weights.size() + p.bias.size();
        } else if constexpr (std::is_same_v<P, LookupParams>) {
          std::size_t n = 0;
          for (const auto& e : p.entries) n += e.key.size();
          return n;
        } else {
          return p.inner->weight_count();
        }
      },
      params_);
}

std::vector<Q16> linear_scores(const ModelSpec& model, std::span<const Q16> features) {
  const auto* p = std::get_if<LinearParams>(&model.params());
  require(p != nullptr, ErrorCode::invalid_argument, "not a linear model");
  require(features.size() == model.dimension(), ErrorCode::dimension_mismatch, "feature length");
  const std::size_t dim = model.dimension();
  std::vector<Q16> scores(model.num_labels());
  for (std::size_t y = 0; y < scores.size(); ++y) {
    // Q32.32 accumulator; each product is below 2^62 so the sum stays far inside 128 bits.
    int128 acc = static_cast<int128>(p->bias[y].raw()) << Q16::kFracBits;
    for (std::size_t j = 0; j < dim; ++j)
      acc += static_cast<int128>(std::int64_t{p->weights[y * dim + j].raw()} * features[j].raw());
    const int128 raw = acc >> Q16::kFracBits;
    scores[y] = raw > INT32_MAX ? Q16::max() : raw < INT32_MIN ? Q16::min() : Q16::from_raw(static_cast<std::int32_t>(raw));
  }
  return scores;
}

LabelId predict(const ModelSpec& model, std::span<const Q16> features, GroupId group) {
  require(features.size() == model.dimension(), ErrorCode::dimension_mismatch,
          "model expects " + std::to_string(model.dimension()) + " features, got " + std::to_string(features.size()));
  return std::visit(
      [&](const auto& p) -> LabelId {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          const std::vector<Q16> scores = linear_scores(model, features);
          LabelId best = 0;
          for (LabelId y = 1; y < scores.size(); ++y)
            if (scores[y] > scores[best]) best = y;
          return best;
        } else if constexpr (std::is_same_v<P, LookupParams>) {
          for (const LookupEntry& e : p.entries)
            if (std::equal(e.key.begin(), e.key.end(), features.begin())) return e.label;
          return p.default_label;
        } else {
          const LabelId inner = predict(*p.inner, features, group);
          require(group < p.flip_rates.size(), ErrorCode::id_out_of_range, "group has no flip rate");
          const std::uint32_t labels = model.num_labels();
          if (labels < 2) return inner;
          CounterPrg coin(p.seed, hash_input(features, group));
          if (!coin.bernoulli_micro(p.flip_rates[group].units)) return inner;
          const auto shift = 1 + static_cast<LabelId>(coin.below(labels - 1));
          return (inner + shift) % labels;
        }
      },
      model.params());
}

std::vector<LabelId> predict_all(const ModelSpec& model, const Dataset& data) {
  std::vector<LabelId> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples) out.push_back(predict(model, s));
  return out;
}

namespace {

void write_model(ByteWriter& w, const ModelSpec& model) {
  w.text(kModelMagic).u8(static_cast<std::uint8_t>(model.architecture())).u32(model.dimension()).u32(model.num_labels());
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          for (Q16 v : p.weights) w.i32(v.raw());
          for (Q16 v : p.bias) w.i32(v.raw());
        } else if constexpr (std::is_same_v<P, LookupParams>) {
          w.u32(static_cast<std::uint32_t>(p.entries.size())).u32(p.default_label);
          for (const LookupEntry& e : p.entries) {
            for (Q16 v : e.key) w.i32(v.raw());
            w.u32(e.label);
          }
        } else {
          write_model(w, *p.inner);
          w.u32(static_cast<std::uint32_t>(p.flip_rates.size()));
          for (Micro r : p.flip_rates) w.u32(r.units);
          w.u64(p.seed);
        }
      },
      model.params());
}

ModelSpec read_model(ByteReader& r, int depth) {
  require(depth < 8, ErrorCode::malformed_model, "wrapper nesting too deep");
  require(r.text(kModelMagic.size()) == kModelMagic, ErrorCode::malformed_model, "bad model magic");
  const auto arch = static_cast<Architecture>(r.u8());
  const std::uint32_t dim = r.u32();
  const std::uint32_t labels = r.u32();
  require(dim <= (1u << 20) && labels >= 1 && labels <= (1u << 16), ErrorCode::malformed_model, "model shape");
  auto q16s = [&](std::size_t n) {
    require(r.remaining() / 4 >= n, ErrorCode::malformed_model, "truncated parameter block");
    std::vector<Q16> v(n);
    for (Q16& q : v) q = Q16::from_raw(r.i32());
    return v;
  };
  switch (arch) {
    case Architecture::threshold_linear: {
      std::vector<Q16> weights = q16s(std::size_t{dim} * labels);
      std::vector<Q16> bias = q16s(labels);
      return ModelSpec::linear(dim, labels, std::move(weights), std::move(bias));
    }
    case Architecture::lookup_table: {
      const std::uint32_t count = r.u32();
      const LabelId fallback = r.u32();
      require(r.remaining() / (4ull * dim + 4) >= count, ErrorCode::malformed_model, "truncated lookup table");
      std::vector<LookupEntry> entries(count);
      for (LookupEntry& e : entries) {
        e.key = q16s(dim);
        e.label = r.u32();
      }
      return ModelSpec::lookup(dim, labels, fallback, std::move(entries));
    }
    case Architecture::biased_wrapper: {
      ModelSpec inner = read_model(r, depth + 1);
      require(inner.dimension() == dim && inner.num_labels() == labels, ErrorCode::malformed_model, "wrapper shape");
      const std::uint32_t groups = r.u32();
      require(r.remaining() / 4 >= groups, ErrorCode::malformed_model, "truncated flip rates");
      std::vector<Micro> rates(groups);
      for (Micro& m : rates) m.units = r.u32();
      const std::uint64_t seed = r.u64();
      return ModelSpec::biased(std::move(inner), std::move(rates), seed);
    }
  }
  fail(ErrorCode::malformed_model, "unknown architecture id " + std::to_string(static_cast<int>(arch)));
}

}  // namespace

Bytes serialize_model(const ModelSpec& model) {
  ByteWriter w;
  write_model(w, model);
  return std::move(w).take();
}

ModelSpec deserialize_model(ByteView bytes) {
  try {
    ByteReader r(bytes, ErrorCode::malformed_model);
    ModelSpec m = read_model(r, 0);
    r.expect_done("model");
    return m;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::malformed_model) throw;
    throw Error(ErrorCode::malformed_model, e.what());
  }
}

}  // namespace faircert

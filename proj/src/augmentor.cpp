#include "faircert/augmentor.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "faircert/prg.hpp"

namespace faircert {

void AugmentorConfig::validate() const {
  require(noise_sigma.raw() >= 0, ErrorCode::invalid_argument, "noise sigma must be nonnegative");
  require(mask_prob.in_closed_unit_interval() && invoke_prob.in_closed_unit_interval() &&
              degree.in_closed_unit_interval(),
          ErrorCode::invalid_argument, "augmentor probabilities must lie in [0,1]");
}

Sample augment(const AugmentorConfig& config, const Sample& sample, std::uint64_t index) {
  Sample out = sample;
  CounterPrg prg(config.master_seed, index);
  const std::uint32_t invoke = config.effective_invoke_prob().units;

  if (prg.bernoulli_micro(invoke) && config.noise_sigma.raw() > 0) {
    const double sigma_raw = config.noise_sigma.raw();
    for (Q16& f : out.features) {
      const double u1 = prg.uniform_open0();
      const double u2 = prg.uniform01();
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      f = Q16::saturate(std::int64_t{f.raw()} + std::llround(z * sigma_raw));
    }
  }
  if (prg.bernoulli_micro(invoke) && config.mask_prob.units > 0) {
    for (Q16& f : out.features)
      if (prg.bernoulli_micro(config.mask_prob.units)) f = Q16{};
  }
  return out;
}

Dataset augment_dataset(const AugmentorConfig& config, const Dataset& data, unsigned threads) {
  config.validate();
  Dataset out{data.dimension, data.num_groups, data.num_labels, std::vector<Sample>(data.size())};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out.samples[i] = augment(config, data.samples[i], i);
  };
  if (threads <= 1 || data.size() < 2 * threads) {
    work(0, data.size());
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (data.size() + threads - 1) / threads;
  for (std::size_t begin = 0; begin < data.size(); begin += chunk)
    pool.emplace_back(work, begin, std::min(data.size(), begin + chunk));
  pool.clear();
  return out;
}

Bytes encode_augmentor(const AugmentorConfig& config, bool include_seed) {
  ByteWriter w;
  w.i32(config.noise_sigma.raw()).u32(config.mask_prob.units).u32(config.invoke_prob.units).u32(config.degree.units);
  if (include_seed) w.u64(config.master_seed);
  return std::move(w).take();
}

AugmentorConfig decode_augmentor(ByteReader& r, bool include_seed) {
  AugmentorConfig c;
  c.noise_sigma = Q16::from_raw(r.i32());
  c.mask_prob.units = r.u32();
  c.invoke_prob.units = r.u32();
  c.degree.units = r.u32();
  if (include_seed) c.master_seed = r.u64();
  c.validate();
  return c;
}

}  // namespace faircert

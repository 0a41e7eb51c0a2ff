#pragma once

#include <cstdint>

#include "faircert/bytes.hpp"
#include "faircert/data.hpp"
#include "faircert/rational.hpp"

namespace faircert {

/// Public augmentation policy. Each stage (Gaussian noise, coordinate masking) is
/// invoked per sample with probability invoke_prob · degree.
struct AugmentorConfig {
  std::uint64_t master_seed = 0;
  Q16 noise_sigma;             // per-coordinate standard deviation
  Micro mask_prob;             // chance a coordinate is zeroed when masking runs
  Micro invoke_prob{kMicroScale};
  Micro degree{kMicroScale};

  void validate() const;
  Micro effective_invoke_prob() const noexcept {
    return Micro{static_cast<std::uint32_t>(std::uint64_t{invoke_prob.units} * degree.units / kMicroScale)};
  }

  friend bool operator==(const AugmentorConfig&, const AugmentorConfig&) = default;
};

/// Group and label are copied; features are perturbed with randomness keyed by (master_seed, index).
Sample augment(const AugmentorConfig& config, const Sample& sample, std::uint64_t index);

/// Sample i of the result is augment(config, sample i, i). `threads` > 1 splits the work.
Dataset augment_dataset(const AugmentorConfig& config, const Dataset& data, unsigned threads = 1);

/// sigma i32 | mask u32 | invoke u32 | degree u32 [| master_seed u64]
Bytes encode_augmentor(const AugmentorConfig& config, bool include_seed);
AugmentorConfig decode_augmentor(ByteReader& reader, bool include_seed);

}  // namespace faircert

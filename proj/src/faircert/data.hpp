#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "faircert/bytes.hpp"
#include "faircert/fixed_point.hpp"

namespace faircert {

using GroupId = std::uint32_t;
using LabelId = std::uint32_t;

struct Sample {
  std::vector<Q16> features;
  GroupId group = 0;
  LabelId label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Labeled, group-annotated test set. Sample order is significant.
struct Dataset {
  std::uint32_t dimension = 0;
  std::uint32_t num_groups = 0;
  std::uint32_t num_labels = 0;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  /// Throws DIMENSION_MISMATCH / ID_OUT_OF_RANGE on the first offending sample.
  void validate() const;

  /// Per-group sample counts.
  std::vector<std::uint64_t> group_counts() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Stable sort by group id: the public layout in which per-group positions are fixed.
Dataset canonical_order(Dataset data);

/// "FAIRD1" | dimension u32 | groups u32 | labels u32 | count u32 | per sample: group u32, label u32, features i32 LE.
Bytes encode_dataset(const Dataset& data);
Dataset decode_dataset(ByteView bytes);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView bytes);

}  // namespace faircert

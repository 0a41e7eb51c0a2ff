#include "faircert/data.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

namespace faircert {

namespace {
constexpr std::string_view kDatasetMagic = "FAIRD1";
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    require(s.features.size() == dimension, ErrorCode::dimension_mismatch,
            "sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) + " features, expected " +
                std::to_string(dimension));
    require(s.group < num_groups, ErrorCode::id_out_of_range, "sample " + std::to_string(i) + " group id");
    require(s.label < num_labels, ErrorCode::id_out_of_range, "sample " + std::to_string(i) + " label id");
  }
}

std::vector<std::uint64_t> Dataset::group_counts() const {
  std::vector<std::uint64_t> counts(num_groups, 0);
  for (const Sample& s : samples) {
    require(s.group < num_groups, ErrorCode::id_out_of_range, "group id");
    ++counts[s.group];
  }
  return counts;
}

Dataset canonical_order(Dataset data) {
  std::stable_sort(data.samples.begin(), data.samples.end(),
                   [](const Sample& a, const Sample& b) { return a.group < b.group; });
  return data;
}

Bytes encode_dataset(const Dataset& data) {
  data.validate();
  ByteWriter w;
  w.text(kDatasetMagic).u32(data.dimension).u32(data.num_groups).u32(data.num_labels);
  w.u32(static_cast<std::uint32_t>(data.samples.size()));
  for (const Sample& s : data.samples) {
    w.u32(s.group).u32(s.label);
    for (Q16 f : s.features) w.i32(f.raw());
  }
  return std::move(w).take();
}

Dataset decode_dataset(ByteView bytes) {
  ByteReader r(bytes, ErrorCode::invalid_argument);
  require(r.text(kDatasetMagic.size()) == kDatasetMagic, ErrorCode::invalid_argument, "bad dataset magic");
  Dataset data;
  data.dimension = r.u32();
  data.num_groups = r.u32();
  data.num_labels = r.u32();
  const std::uint32_t count = r.u32();
  require(r.remaining() / (8 + 4ull * data.dimension) >= count, ErrorCode::invalid_argument,
          "dataset shorter than its declared count");
  data.samples.resize(count);
  for (Sample& s : data.samples) {
    s.group = r.u32();
    s.label = r.u32();
    s.features.resize(data.dimension);
    for (Q16& f : s.features) f = Q16::from_raw(r.i32());
  }
  r.expect_done("dataset");
  data.validate();
  return data;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::io_error, "short write to " + path);
}

}  // namespace faircert

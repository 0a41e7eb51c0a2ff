#include "doctest.h"

#include <cmath>

#include "faircert/augmentor.hpp"
#include "faircert/planted.hpp"

using namespace faircert;

namespace {

Dataset sample_data(std::size_t n) {
  const PlantedConfig c = PlantedConfig::uniform(3, 2, {Micro{0}, Micro{0}, Micro{0}}, 4, 6);
  return draw_planted(c, n, 10);
}

AugmentorConfig noisy(std::uint64_t seed) {
  AugmentorConfig a;
  a.master_seed = seed;
  a.noise_sigma = Q16::from_double(0.5);
  a.mask_prob = Micro{200'000};
  return a;
}

}  // namespace

TEST_SUITE("augmentor") {

TEST_CASE("identity configurations") {
  const Dataset d = sample_data(2000);
  AugmentorConfig zero;
  zero.master_seed = 123;
  CHECK(augment_dataset(zero, d) == d);
  AugmentorConfig off = noisy(5);
  off.invoke_prob = Micro{0};
  CHECK(augment_dataset(off, d) == d);
  AugmentorConfig deg = noisy(5);
  deg.degree = Micro{0};
  CHECK(augment_dataset(deg, d) == d);
}

TEST_CASE("group and label are preserved") {
  const Dataset d = sample_data(5000);
  const Dataset a = augment_dataset(noisy(1), d);
  REQUIRE(a.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(a.samples[i].group == d.samples[i].group);
    CHECK(a.samples[i].label == d.samples[i].label);
    CHECK(a.samples[i].features.size() == d.samples[i].features.size());
  }
}

TEST_CASE("seeded determinism and seed sensitivity") {
  const Dataset d = sample_data(3000);
  CHECK(augment_dataset(noisy(9), d) == augment_dataset(noisy(9), d));
  const Dataset a = augment_dataset(noisy(9), d), b = augment_dataset(noisy(10), d);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < d.size(); ++i) differ += a.samples[i] != b.samples[i];
  CHECK(differ * 100 >= d.size() * 99);
}

TEST_CASE("freshness: each index uses its own stream") {
  const Dataset d = sample_data(10);
  Dataset same = d;
  for (Sample& s : same.samples) s = d.samples[0];
  const Dataset a = augment_dataset(noisy(3), same);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a.samples[i] != a.samples[0]);
  CHECK(augment(noisy(3), d.samples[4], 4) == augment_dataset(noisy(3), d).samples[4]);
}

TEST_CASE("parallel output equals sequential") {
  const Dataset d = sample_data(10'001);
  const Dataset seq = augment_dataset(noisy(77), d, 1);
  for (unsigned t : {2u, 3u, 8u}) CHECK(augment_dataset(noisy(77), d, t) == seq);
}

TEST_CASE("full mask zeroes every coordinate") {
  AugmentorConfig a;
  a.master_seed = 1;
  a.mask_prob = Micro{kMicroScale};
  const Dataset out = augment_dataset(a, sample_data(500));
  for (const Sample& s : out.samples)
    for (Q16 f : s.features) CHECK(f == Q16{});
}

TEST_CASE("noise has the configured spread") {
  AugmentorConfig a;
  a.master_seed = 2;
  a.noise_sigma = Q16::from_double(0.25);
  const Dataset d = sample_data(20'000);
  const Dataset out = augment_dataset(a, d);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.samples[i].features.size(); ++j) {
      const double diff = out.samples[i].features[j].to_double() - d.samples[i].features[j].to_double();
      sum += diff;
      sq += diff * diff;
      ++n;
    }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(sd - 0.25) < 0.01);
}

TEST_CASE("invocation probability scales with degree") {
  AugmentorConfig a = noisy(4);
  a.mask_prob = Micro{0};
  a.invoke_prob = Micro{500'000};
  a.degree = Micro{500'000};
  CHECK(a.effective_invoke_prob() == Micro{250'000});
  const Dataset d = sample_data(20'000);
  const Dataset out = augment_dataset(a, d);
  std::size_t touched = 0;
  for (std::size_t i = 0; i < d.size(); ++i) touched += out.samples[i] != d.samples[i];
  CHECK(std::fabs(static_cast<double>(touched) / d.size() - 0.25) < 0.02);
}

TEST_CASE("config codec and validation") {
  const AugmentorConfig a = noisy(0xabcdef);
  const Bytes with = encode_augmentor(a, true), without = encode_augmentor(a, false);
  CHECK(with.size() == without.size() + 8);
  ByteReader r(with);
  CHECK(decode_augmentor(r, true) == a);
  ByteReader r2(without);
  AugmentorConfig b = decode_augmentor(r2, false);
  CHECK(b.master_seed == 0);
  b.master_seed = a.master_seed;
  CHECK(b == a);
  AugmentorConfig bad = a;
  bad.mask_prob = Micro{kMicroScale + 1};
  CHECK_THROWS(bad.validate());
  bad = a;
  bad.noise_sigma = Q16::from_double(-1);
  CHECK_THROWS(augment_dataset(bad, sample_data(3)));
}

}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "skp/rng.hpp"

using namespace skp;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors published with the original counter-based generator.
  std::uint32_t out[4];

  const std::uint32_t zero_ctr[4] = {0, 0, 0, 0};
  const std::uint32_t zero_key[2] = {0, 0};
  detail::philox4x32_10(zero_ctr, zero_key, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  const std::uint32_t ones_ctr[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu,
                                     0xffffffffu};
  const std::uint32_t ones_key[2] = {0xffffffffu, 0xffffffffu};
  detail::philox4x32_10(ones_ctr, ones_key, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  const std::uint32_t pi_ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                   0x03707344u};
  const std::uint32_t pi_key[2] = {0xa4093822u, 0x299f31d0u};
  detail::philox4x32_10(pi_ctr, pi_key, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams replay and substreams differ") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 8);
  bool all_equal = true;
  RngStream a2(42, 7);
  for (int i = 0; i < 16; ++i) {
    if (a2.next_u64() != c.next_u64()) all_equal = false;
  }
  CHECK_FALSE(all_equal);

  RngStream parent(1, 0);
  RngStream s0 = parent.substream(0);
  RngStream s1 = parent.substream(1);
  CHECK(s0.stream() != s1.stream());
  CHECK(parent.substream(0).stream() == s0.stream());
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(123, 0);
  const int n = 200000;
  double sum_u = 0.0, sum_n = 0.0, sum_n2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum_u += u;
    const double z = rng.normal();
    sum_n += z;
    sum_n2 += z * z;
  }
  CHECK(sum_u / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_n / n == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
  CHECK(sum_n2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("next_below covers the range uniformly") {
  RngStream rng(9, 3);
  const std::uint64_t buckets = 6;
  const int n = 60000;
  std::vector<int> counts(buckets, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.next_below(buckets)];
  const double p = 1.0 / double(buckets);
  const double sigma = std::sqrt(p * (1 - p) / n);
  for (std::uint64_t k = 0; k < buckets; ++k) {
    CHECK(std::abs(counts[k] / double(n) - p) <= 3.0 * sigma + 1e-12);
  }
}

#pragma once

#include <cstdint>

namespace skp {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by (seed, stream id). Streams with distinct ids are
/// statistically independent, so Monte-Carlo trials, Monte-Carlo spectral
/// sampling and nested inner solvers can each own a substream and replay it
/// exactly. All derived variates (uniform, normal, subset sampling) are
/// produced by our own code on top of the raw counter output, so a given
/// (seed, stream, position) yields the same values on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0,1) with 53 random bits.
  double uniform();

  /// Standard normal (Box-Muller; second variate of each pair is cached).
  double normal();

  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  /// Independent stream derived from this stream's identity; `idx` selects
  /// among siblings. Does not advance this stream.
  RngStream substream(std::uint64_t idx) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void generate_block();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;   // counter low words, incremented per block
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int buf_pos_ = 4;           // 4 == empty
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

namespace detail {
/// One Philox4x32-10 block: 4 output words from a 128-bit counter and a
/// 64-bit key. Exposed for known-answer tests.
void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

/// SplitMix64 finalizer, used to derive substream identities.
std::uint64_t splitmix64(std::uint64_t x);
}  // namespace detail

}  // namespace skp

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace zest {

/// Deterministic counter-based random stream.
///
/// A stream is identified by a 64-bit key; the n-th output is a keyed hash of
/// n, so a stream's sequence depends only on its key and never on which thread
/// consumes it or when. Independent substreams are addressed by index paths,
/// e.g. `master.substream(replicate).substream(particle).substream(t)`, which
/// makes parallel schedules reproduce sequential ones bit for bit.
///
/// Satisfies UniformRandomBitGenerator, so it can drive <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  /// Child stream for `index`. Does not advance this stream.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  result_type operator()();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

}  // namespace zest

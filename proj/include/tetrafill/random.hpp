#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace tetrafill {

/// Counter-based random stream: the n-th output is a pure function of
/// (seed, stream_index, n), so samples can be farmed out to any number of workers.
///
/// Output is the SplitMix64 finalizer applied to key + n * golden_gamma, where
/// the key is a mix of seed and stream index. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double gaussian();
  /// Standard complex normal (real and imaginary parts N(0, 1/2)).
  std::complex<double> complex_gaussian();

  /// Independent stream for a different purpose (e.g. solver restarts) of the same sample.
  [[nodiscard]] RngStream lane(std::uint64_t lane_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace tetrafill

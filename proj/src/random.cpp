#include "tetrafill/random.hpp"

#include <random>

namespace tetrafill {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed),
      stream_(stream_index),
      key_(mix64(mix64(seed) ^ (stream_index * kGoldenGamma + 1))) {}

RngStream::result_type RngStream::operator()() { return mix64(key_ + (++counter_) * kGoldenGamma); }

double RngStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RngStream::gaussian() { return std::normal_distribution<double>{}(*this); }

std::complex<double> RngStream::complex_gaussian() {
  constexpr double kHalfVar = 0.70710678118654752440;
  const double re = gaussian();
  const double im = gaussian();
  return {kHalfVar * re, kHalfVar * im};
}

RngStream RngStream::lane(std::uint64_t lane_id) const {
  return RngStream(mix64(seed_ ^ mix64(lane_id + kGoldenGamma)), stream_);
}

}  // namespace tetrafill

#include "dcfp/rng.hpp"

#include "dcfp/constants.hpp"

#include <cmath>

namespace dcfp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace

SplitStream::SplitStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(mix64(seed + kGolden) ^ mix64(stream_id * kGolden + 1)) {}

std::uint64_t SplitStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitStream::next_double_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::pair<double, double> SplitStream::next_gaussian_pair() {
  const double u1 = next_double_open();
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return {radius * std::cos(two_pi * u2), radius * std::sin(two_pi * u2)};
}

} // namespace dcfp

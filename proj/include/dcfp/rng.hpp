#pragma once

#include <cstdint>
#include <utility>

namespace dcfp {

/// Counter-based splittable random stream. A stream is keyed by (seed,
/// stream_id); streams with distinct ids are statistically independent, so
/// per-pair substreams can be generated in any order (or in parallel) with
/// results identical to serial generation. Pure 64-bit integer arithmetic:
/// the u64 sequence is bit-exact across platforms.
class SplitStream {
public:
  SplitStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53 random bits.
  double next_double();

  /// Uniform in (0, 1], safe as a log argument.
  double next_double_open();

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> next_gaussian_pair();

private:
  std::uint64_t state_;
};

} // namespace dcfp

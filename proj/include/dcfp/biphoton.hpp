#pragma once

#include "dcfp/channels.hpp"
#include "dcfp/mirror.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dcfp {

// Normalized rate of simultaneous L1 & R1 clicks:
//   T^8 / (1 + R^8 - 2 R^4 cos(theta)).
// 2*pi-periodic and even in theta; maximal on resonance (theta = 0).
double transmission_coincidence_rate(const MirrorCoefficients& mirrors, double theta);

// Closed-form joint-detection amplitude of one post-selection channel, all
// over the common denominator 1 - R^4 e^{i theta}:
//   TT, any m:      T^4 R^{2|m|}
//   RR, m = 0:      R^2 (1 - (R^2 - T^2) e^{i theta})
//   RR, m != 0:     T^2 R^{2|m|} (-1 + R^2 e^{i theta})
//   RT, m >= 0:     T^2 R^{2m+1} (-1 + R^2 e^{i theta})
//   RT, m < 0:      T^4 R^{2|m|-1}
//   TR, m <= 0:     like RT with m -> |m| (arms swapped)
//   TR, m > 0:      T^4 R^{2m-1}
// For T = 0 exactly on resonance the expressions degenerate to 0/0; the
// analytic limit (RR m=0 -> 1, everything else -> 0) is returned with
// limit_evaluation set.
JointAmplitude channel_amplitude(const MirrorCoefficients& mirrors, double theta,
                                 DetectionOutcome outcome);

/// Probabilities of every post-selection channel with |m| <= max_offset,
/// plus the analytic bound on the discarded geometric tail.
struct ChannelDistribution {
  std::vector<std::pair<DetectionOutcome, double>> probabilities;
  double tail_bound = 0.0;
  int max_offset = 0;

  double probability(const DetectionOutcome& outcome) const;
  double total() const;
};

// Aggregates the closed forms over all channels and offsets, truncating at
// the smallest max offset M whose geometric tail (ratio R^4 per unit |m|)
// drops below tail_tolerance. Throws std::runtime_error if no M <= 10^6
// meets the tolerance (only approachable as R -> 1).
ChannelDistribution channel_distribution(const MirrorCoefficients& mirrors,
                                         double theta, double tail_tolerance);

// Analytic bound on the total probability discarded when every channel is
// truncated at |m| <= max_offset.
double distribution_tail_bound(const MirrorCoefficients& mirrors, double theta,
                               int max_offset);

// FWHM in theta of the transmission coincidence resonance,
// 4 asin((1 - R^4) / (2 R^2)). Empty when the half-max level is never
// crossed (broad-resonance regime, small R).
std::optional<double> resonance_linewidth(const MirrorCoefficients& mirrors);

} // namespace dcfp

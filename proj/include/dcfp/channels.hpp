#pragma once

#include <compare>
#include <complex>
#include <string>

namespace dcfp {

/// Which detector pair fired. TT = L1 & R1 (both transmitted),
/// RR = L2 & R2 (both reflected), RT = L2 & R1, TR = L1 & R2.
enum class Channel { TT, RR, RT, TR };

const char* to_string(Channel channel);

/// Post-selection channel: detector pair plus click-time separation in units
/// of one cavity round trip 2d/c. Positive offset_m means the left-arm click
/// leads (arrives earlier); negative means the right-arm click leads.
struct DetectionOutcome {
  Channel channel = Channel::TT;
  int offset_m = 0;

  friend auto operator<=>(const DetectionOutcome&, const DetectionOutcome&) = default;
};

std::string to_string(const DetectionOutcome& outcome);

/// Joint-detection amplitude for one post-selection channel, normalized so
/// the no-cavity coincidence amplitude is 1.
///
/// Convention: the plane-wave carrier e^{i(kx - wt)} and the channel-global
/// phase e^{-i w_L dt} are stripped; they never reach any rate.
struct JointAmplitude {
  std::complex<double> value{0.0, 0.0};
  DetectionOutcome outcome{};
  // Set when the closed form was 0/0 (T = 0 on resonance) and the stored
  // value is the analytic limit.
  bool limit_evaluation = false;

  double rate() const { return std::norm(value); }
};

} // namespace dcfp

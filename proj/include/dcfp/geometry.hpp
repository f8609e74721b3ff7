#pragma once

#include "dcfp/mirror.hpp"

namespace dcfp {

/// Cavity geometry plus photon frequencies. The derived round-trip phase
/// theta = 2 k_L d_L + 2 k_R d_R (mod 2*pi) is the single dimensionless knob
/// every rate formula takes; raw lengths and frequencies enter nowhere else.
class InterferometerConfig {
public:
  // pulse_length: c times the single-photon coherence time, used only by the
  // geometry validity check.
  InterferometerConfig(double d_left, double d_right,
                       double omega_left, double omega_right,
                       double pulse_length);

  double d_left() const { return d_left_; }
  double d_right() const { return d_right_; }
  double omega_left() const { return omega_left_; }
  double omega_right() const { return omega_right_; }
  double pulse_length() const { return pulse_length_; }

  /// Round-trip phase in [0, 2*pi).
  double theta() const { return theta_; }

  // The arm-length mismatch blurred over the cavity dwell time must stay
  // small against the photon pulse length: finesse * |d_L - d_R| below
  // one tenth of the pulse length.
  bool geometry_valid(const MirrorCoefficients& mirrors) const;

  /// Round-trip time 2 d / c of one cavity (left arm).
  double round_trip_time_left() const;

private:
  double d_left_;
  double d_right_;
  double omega_left_;
  double omega_right_;
  double pulse_length_;
  double theta_;
};

// True iff k_L d_L + k_R d_R sits within `tolerance` of an integer multiple
// of pi, i.e. theta within 2*tolerance of a multiple of 2*pi.
bool on_resonance(const InterferometerConfig& config, double tolerance);

} // namespace dcfp

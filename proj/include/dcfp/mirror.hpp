#pragma once

#include <stdexcept>

namespace dcfp {

/// Field transmission/reflection pair of the (identical, lossless) cavity
/// mirrors. The single physical knob of both cavities: T^2 + R^2 = 1.
class MirrorCoefficients {
public:
  // Both coefficients given explicitly; they must satisfy T^2 + R^2 = 1
  // within 1e-12 and be non-negative.
  MirrorCoefficients(double t_field, double r_field);

  static MirrorCoefficients from_transmission(double t_field);
  static MirrorCoefficients from_reflection(double r_field);

  double t_field() const { return t_; }
  double r_field() const { return r_; }

  // FSR / FWHM of the joint-resonance profile in the round-trip phase:
  // pi R^2 / (1 - R^4). Diverges as R -> 1.
  double finesse() const;

private:
  double t_;
  double r_;
};

} // namespace dcfp

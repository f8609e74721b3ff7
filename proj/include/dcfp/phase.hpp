#pragma once

#include <stdexcept>

namespace dcfp {

/// Raised when a requested phase reduction would lose more precision than
/// the double-double scheme can guarantee.
class PhaseRangeError : public std::range_error {
public:
  using std::range_error::range_error;
};

// Reduce an angle to [0, 2*pi). Plain double path, adequate for angles of
// order unity (scan bookkeeping, readout inversion).
double reduce_mod_two_pi(double angle);

// Joint round-trip phase theta = 2 (omega_left d_left + omega_right d_right) / c
// reduced to [0, 2*pi). The products and the reduction run in double-double
// arithmetic, so the result stays accurate to well below 1e-9 rad even when
// the unreduced phase is ~1e9 rad. Throws PhaseRangeError once the unreduced
// phase leaves the range where the quotient is exactly representable
// (|phase| > 2^49 rad).
double phase_from_geometry(double omega_left, double omega_right,
                           double d_left, double d_right);

// Distance of theta (already reduced or not) from the nearest multiple of
// 2*pi, in [0, pi].
double resonance_distance(double theta);

} // namespace dcfp

#pragma once

#include "dcfp/envelope.hpp"
#include "dcfp/mirror.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcfp {

/// Raised when a round trip time is not an integer multiple of the envelope
/// grid step; the message names the nearest commensurate value.
class CommensurabilityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Nearest integer multiple of tau_step to round_trip_time, at least one step.
double nearest_commensurate_round_trip(double round_trip_time, double tau_step);

// Windowed transform of the envelope through both cavities:
//   A(tau) = T^4 sum_{l=0}^{l_max} R^{4l} e^{i theta l} phi(tau + l dt),
// evaluated on phi's own grid; samples shifted beyond the grid contribute
// zero. round_trip_time must be commensurate with the grid.
EnvelopeFunction windowed_coincidence_amplitude(const EnvelopeFunction& envelope,
                                                const MirrorCoefficients& mirrors,
                                                double theta,
                                                double round_trip_time,
                                                int l_max);

// Normalized coincidence rate: integral |A|^2 / integral |phi|^2
// (trapezoidal). Reduces to the ideal closed-form rate for an envelope flat
// over many round trips and to the incoherent power sum T^8/(1-R^8) when the
// support fits inside one round trip.
double coincidence_rate_from_envelope(const EnvelopeFunction& envelope,
                                      const MirrorCoefficients& mirrors,
                                      double theta,
                                      double round_trip_time,
                                      int l_max);

struct ScanMetadata {
  double t_field = 0.0;
  int l_max = 0;
  std::string envelope_id;
  double sum_frequency = 0.0;     // rad/s; 0 for phase-parameterized scans
  double round_trip_time = 0.0;   // seconds; grid-snapped value actually used
};

/// Coincidence rates along a cavity-length (or phase) sweep.
struct ScanResult {
  std::vector<double> d_values;      // empty when parameterized by phase
  std::vector<double> theta_values;
  std::vector<double> rates;
  ScanMetadata meta;

  std::size_t size() const { return rates.size(); }
  double round_trip_time_at(std::size_t i) const;
};

// Single-cavity sweep (d_L = d_R = d): for each d the joint phase is
// 2 * sum_frequency * d / c and the round trip time 2 d / c, snapped to the
// nearest envelope-grid multiple (the phase keeps the exact length; the
// sub-step round-trip adjustment is below the grid's own resolution).
ScanResult cavity_scan(const EnvelopeFunction& envelope,
                       const MirrorCoefficients& mirrors,
                       const std::vector<double>& d_values,
                       double sum_frequency, int l_max);

// Sweep over the joint phase directly at a fixed round trip time.
ScanResult phase_scan(const EnvelopeFunction& envelope,
                      const MirrorCoefficients& mirrors,
                      const std::vector<double>& theta_values,
                      double round_trip_time, int l_max);

struct SpectralLine {
  double frequency_offset = 0.0; // rad/s, inside [0, FSR)
  double weight = 0.0;           // peak rate
};

/// Peak-based inversion of a scan into envelope frequency content. Offsets
/// are only determined modulo the free spectral range.
struct SpectralReadout {
  std::vector<SpectralLine> lines;
  bool resolved = true;
  std::string note;
};

// Detects local rate maxima above threshold_fraction of the global maximum
// and maps each peak's phase position to a frequency offset modulo the free
// spectral range (a component e^{i Omega tau} moves its resonance to
// theta = -Omega * round_trip_time). Peak positions are refined by local
// parabolic interpolation.
SpectralReadout spectral_readout(const ScanResult& scan,
                                 const MirrorCoefficients& mirrors,
                                 double free_spectral_range,
                                 double threshold_fraction = 0.1);

// Scan CSV: columns d_meters,theta_rad,rate (d is nan for phase scans).
void save_scan_csv(const ScanResult& scan, std::ostream& out);
ScanResult load_scan_csv(std::istream& in);
ScanResult load_scan_csv_file(const std::string& path);

} // namespace dcfp

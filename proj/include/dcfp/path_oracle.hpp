#pragma once

#include "dcfp/channels.hpp"
#include "dcfp/mirror.hpp"

#include <complex>
#include <map>
#include <span>
#include <vector>

namespace dcfp {

/// One single-photon Fabry-Perot exit path.
enum class Port { transmit, reflect };

/// Amplitude convention: mirror transmission contributes a real factor T,
/// internal reflection +R, prompt external reflection -R. The propagation
/// phase e^{i * round_trips * phase_per_trip} is not folded into `amplitude`;
/// callers apply it when summing coherently.
struct PathAmplitude {
  Port port = Port::transmit;
  int round_trips = 0;
  std::complex<double> amplitude{0.0, 0.0};
  double phase_per_trip = 0.0; // 2 k d for this photon
};

// All exit paths with at most l_max round trips: transmit l = 0..l_max
// (amplitude T^2 R^{2l}) and reflect l = 0..l_max (-R for l = 0,
// T^2 R^{2l-1} for l >= 1). 2 l_max + 2 entries.
std::vector<PathAmplitude> enumerate_single_photon_paths(
    const MirrorCoefficients& mirrors, int l_max, double phase_per_trip = 0.0);

// Coherent sum over one port, each path weighted by
// e^{i * round_trips * phase_per_trip}.
std::complex<double> coherent_port_sum(std::span<const PathAmplitude> paths, Port port);

// Probability missed by truncating the single-photon expansion at l_max:
// T^4 R^{4 l_max + 2} (1 + R^2) / (1 - R^4).
double single_photon_tail_bound(const MirrorCoefficients& mirrors, int l_max);

// Brute-force joint amplitude: coherent sum over all path pairs
// (l_left, l_right) whose ports match the outcome's channel and whose exit
// delay difference l_right - l_left equals the outcome's offset, each term
// carrying the joint phase e^{i theta min(l_left, l_right)}. Converges to
// channel_amplitude as l_max grows.
std::complex<double> biphoton_amplitude_bruteforce(const MirrorCoefficients& mirrors,
                                                   double theta,
                                                   DetectionOutcome outcome,
                                                   int l_max);

// Bound on the amplitude missed by the truncation above (ratio R^4 per unit
// of the summation index).
double bruteforce_tail_bound(const MirrorCoefficients& mirrors,
                             DetectionOutcome outcome, int l_max);

/// Transmission statistics of a simultaneous but unentangled photon pair:
/// incoherent products of single-photon exit probabilities. Reads no phase,
/// so every value is cavity-length independent by construction.
struct SeparableBaseline {
  // Probability that both photons transmit, any exit-time offset; equal to
  // the product of the marginal transmission probabilities (T^4/(1-R^4))^2.
  // This is the figure the entangled TT m=0 resonance is contrasted against.
  double coincidence_rate = 0.0;
  // Offset-resolved split of the same total: per_offset_rates[m] sums
  // |a_L(l)|^2 |a_R(l+m)|^2; the m = 0 entry (strictly simultaneous exits)
  // is T^8/(1-R^8).
  std::map<int, double> per_offset_rates;
};

SeparableBaseline separable_coincidence_baseline(const MirrorCoefficients& mirrors,
                                                 int l_max);

/// Per-outcome deviation between the closed forms and the truncated path sum.
struct ComparisonEntry {
  DetectionOutcome outcome;
  double deviation = 0.0;
  double tail_bound = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  int l_max = 0;
  double tolerance = 0.0;

  bool all_pass() const;
  std::vector<ComparisonEntry> failures() const;
};

// Verifies channel_amplitude against the brute-force sum for every requested
// outcome. An entry fails when the deviation exceeds the tolerance or when
// the truncation tail itself is too large for the tolerance to be meaningful.
ComparisonReport compare_with_closed_form(const MirrorCoefficients& mirrors,
                                          double theta,
                                          std::span<const DetectionOutcome> outcomes,
                                          int l_max, double tolerance);

} // namespace dcfp

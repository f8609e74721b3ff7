#include "dcfp/spectral.hpp"

#include "dcfp/biphoton.hpp"
#include "dcfp/constants.hpp"
#include "dcfp/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dcfp {

namespace {

constexpr double kCommensurateTolerance = 1e-9;

// Integer step count of a commensurate round trip; throws otherwise.
std::size_t commensurate_steps(double round_trip_time, double tau_step) {
  const double ratio = round_trip_time / tau_step;
  const double k = std::nearbyint(ratio);
  if (k < 1.0 || std::abs(ratio - k) > kCommensurateTolerance * std::max(1.0, ratio)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "round_trip_time %.17g is not an integer multiple of tau_step %.17g; "
                  "nearest commensurate value is %.17g",
                  round_trip_time, tau_step,
                  std::max(1.0, k) * tau_step);
    throw CommensurabilityError(msg);
  }
  return static_cast<std::size_t>(k);
}

} // namespace

double nearest_commensurate_round_trip(double round_trip_time, double tau_step) {
  if (!(tau_step > 0.0)) throw std::invalid_argument("tau_step must be positive");
  const double k = std::max(1.0, std::nearbyint(round_trip_time / tau_step));
  return k * tau_step;
}

EnvelopeFunction windowed_coincidence_amplitude(const EnvelopeFunction& envelope,
                                                const MirrorCoefficients& mirrors,
                                                double theta,
                                                double round_trip_time,
                                                int l_max) {
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  const std::size_t shift = commensurate_steps(round_trip_time, envelope.tau_step());
  const std::size_t n = envelope.size();
  const double t4 = std::pow(mirrors.t_field(), 4);
  const double r4 = std::pow(mirrors.r_field(), 4);

  std::vector<std::complex<double>> out(n, {0.0, 0.0});
  const std::complex<double>* phi = envelope.samples().data();
  for (int l = 0; l <= l_max; ++l) {
    const std::size_t offset = shift * static_cast<std::size_t>(l);
    if (offset >= n) break;
    const double magnitude = t4 * std::pow(r4, l);
    if (magnitude == 0.0 && l > 0) break;
    const double phase = theta * l;
    const std::complex<double> coef =
        magnitude * std::complex<double>(std::cos(phase), std::sin(phase));
    const std::size_t count = n - offset;
    for (std::size_t i = 0; i < count; ++i) {
      out[i] += coef * phi[i + offset];
    }
  }
  return EnvelopeFunction(envelope.tau_start(), envelope.tau_step(), std::move(out));
}

double coincidence_rate_from_envelope(const EnvelopeFunction& envelope,
                                      const MirrorCoefficients& mirrors,
                                      double theta,
                                      double round_trip_time,
                                      int l_max) {
  const EnvelopeFunction transformed = windowed_coincidence_amplitude(
      envelope, mirrors, theta, round_trip_time, l_max);
  const double power_in = envelope.l2_norm_squared();
  if (!(power_in > 0.0)) {
    throw std::invalid_argument("envelope has zero power");
  }
  return transformed.l2_norm_squared() / power_in;
}

double ScanResult::round_trip_time_at(std::size_t i) const {
  if (!d_values.empty()) return 2.0 * d_values[i] / speed_of_light;
  return meta.round_trip_time;
}

ScanResult cavity_scan(const EnvelopeFunction& envelope,
                       const MirrorCoefficients& mirrors,
                       const std::vector<double>& d_values,
                       double sum_frequency, int l_max) {
  if (!(sum_frequency > 0.0)) {
    throw std::invalid_argument("sum_frequency must be positive");
  }
  ScanResult scan;
  scan.meta.t_field = mirrors.t_field();
  scan.meta.l_max = l_max;
  scan.meta.sum_frequency = sum_frequency;
  scan.d_values = d_values;
  scan.theta_values.reserve(d_values.size());
  scan.rates.reserve(d_values.size());
  for (double d : d_values) {
    if (!(d > 0.0)) throw std::invalid_argument("cavity lengths must be positive");
    const double theta =
        phase_from_geometry(0.5 * sum_frequency, 0.5 * sum_frequency, d, d);
    const double trip = 2.0 * d / speed_of_light;
    if (trip < 0.5 * envelope.tau_step()) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "cavity round trip %.17g s is below the envelope grid step; "
                    "nearest commensurate value is %.17g s",
                    trip, envelope.tau_step());
      throw CommensurabilityError(msg);
    }
    const double snapped = nearest_commensurate_round_trip(trip, envelope.tau_step());
    scan.meta.round_trip_time = snapped;
    scan.theta_values.push_back(theta);
    scan.rates.push_back(
        coincidence_rate_from_envelope(envelope, mirrors, theta, snapped, l_max));
  }
  return scan;
}

ScanResult phase_scan(const EnvelopeFunction& envelope,
                      const MirrorCoefficients& mirrors,
                      const std::vector<double>& theta_values,
                      double round_trip_time, int l_max) {
  ScanResult scan;
  scan.meta.t_field = mirrors.t_field();
  scan.meta.l_max = l_max;
  scan.meta.round_trip_time = round_trip_time;
  scan.theta_values = theta_values;
  scan.rates.reserve(theta_values.size());
  for (double theta : theta_values) {
    scan.rates.push_back(
        coincidence_rate_from_envelope(envelope, mirrors, theta, round_trip_time, l_max));
  }
  return scan;
}

SpectralReadout spectral_readout(const ScanResult& scan,
                                 const MirrorCoefficients& mirrors,
                                 double free_spectral_range,
                                 double threshold_fraction) {
  const std::size_t n = scan.size();
  if (n < 3) throw std::invalid_argument("readout needs at least 3 scan points");
  if (!(free_spectral_range > 0.0)) {
    throw std::invalid_argument("free spectral range must be positive");
  }

  // Order by reduced phase; the d sweep may wrap several times.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> reduced(n);
  for (std::size_t i = 0; i < n; ++i) reduced[i] = reduce_mod_two_pi(scan.theta_values[i]);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return reduced[a] < reduced[b]; });

  // Coverage: the largest circular gap must not hide a resonance.
  double max_gap = 0.0;
  double sum_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = reduced[order[i]];
    const double b = (i + 1 < n) ? reduced[order[i + 1]] : reduced[order[0]] + two_pi;
    max_gap = std::max(max_gap, b - a);
    sum_gap += b - a;
  }
  const double mean_gap = sum_gap / static_cast<double>(n);
  if (max_gap > std::max(10.0 * mean_gap, two_pi / 16.0)) {
    throw std::invalid_argument(
        "scan does not cover a full free spectral range densely enough for readout");
  }

  SpectralReadout readout;
  readout.note = "offsets aliased modulo the free spectral range";

  const auto linewidth = resonance_linewidth(mirrors);

  // Cyclic local maxima above threshold, with parabolic refinement.
  double max_rate = 0.0;
  for (double r : scan.rates) max_rate = std::max(max_rate, r);
  const double threshold = threshold_fraction * max_rate;
  std::vector<double> peak_positions;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = order[(i + n - 1) % n];
    const std::size_t here = order[i];
    const std::size_t next = order[(i + 1) % n];
    const double r0 = scan.rates[prev];
    const double r1 = scan.rates[here];
    const double r2 = scan.rates[next];
    if (!(r1 >= threshold && r1 > r0 && r1 >= r2)) continue;
    double position = reduced[here];
    double height = r1;
    const double curvature = r0 - 2.0 * r1 + r2;
    if (curvature < 0.0) {
      // Local grid step around the peak (handles the circular seam).
      double left = reduced[here] - reduced[prev];
      if (left <= 0.0) left += two_pi;
      double right = reduced[next] - reduced[here];
      if (right <= 0.0) right += two_pi;
      const double step = 0.5 * (left + right);
      const double delta = 0.5 * (r0 - r2) / curvature;
      position = reduce_mod_two_pi(position + delta * step);
      height = r1 - 0.25 * (r0 - r2) * delta;
    }
    peak_positions.push_back(position);
    readout.lines.push_back(SpectralLine{
        reduce_mod_two_pi(-position) / two_pi * free_spectral_range, height});
  }

  if (!linewidth.has_value()) {
    readout.resolved = false;
    readout.note += "; resonance linewidth unresolved (half-max never crossed)";
    return readout;
  }
  if (peak_positions.size() >= 2) {
    std::sort(peak_positions.begin(), peak_positions.end());
    double min_spacing = two_pi;
    for (std::size_t i = 0; i < peak_positions.size(); ++i) {
      const double a = peak_positions[i];
      const double b = (i + 1 < peak_positions.size())
                           ? peak_positions[i + 1]
                           : peak_positions[0] + two_pi;
      min_spacing = std::min(min_spacing, b - a);
    }
    if (min_spacing < *linewidth) {
      readout.resolved = false;
      readout.note += "; peaks closer than one linewidth";
    }
  }
  std::sort(readout.lines.begin(), readout.lines.end(),
            [](const SpectralLine& a, const SpectralLine& b) {
              return a.frequency_offset < b.frequency_offset;
            });
  return readout;
}

void save_scan_csv(const ScanResult& scan, std::ostream& out) {
  out << "d_meters,theta_rad,rate\n";
  char buf[128];
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double d = scan.d_values.empty()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : scan.d_values[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", d, scan.theta_values[i],
                  scan.rates[i]);
    out << buf;
  }
}

ScanResult load_scan_csv(std::istream& in) {
  ScanResult scan;
  std::string line;
  bool header_seen = false;
  bool any_d = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "d_meters,theta_rad,rate") {
        throw std::runtime_error("scan CSV header must be 'd_meters,theta_rad,rate'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    double values[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(row, field, ',')) {
        throw std::runtime_error("scan CSV row has fewer than 3 fields: " + line);
      }
      values[k] = std::stod(field);
    }
    if (std::isfinite(values[0])) any_d = true;
    scan.d_values.push_back(values[0]);
    scan.theta_values.push_back(values[1]);
    scan.rates.push_back(values[2]);
  }
  if (!header_seen) throw std::runtime_error("scan CSV has no header");
  if (!any_d) scan.d_values.clear();
  return scan;
}

ScanResult load_scan_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan file: " + path);
  return load_scan_csv(in);
}

} // namespace dcfp

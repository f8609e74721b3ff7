#include "dcfp/spectral.hpp"

#include "dcfp/biphoton.hpp"
#include "dcfp/constants.hpp"
#include "dcfp/envelope.hpp"
#include "dcfp/phase.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

using namespace dcfp;

namespace {

const MirrorCoefficients kHalf = MirrorCoefficients::from_transmission(0.5);
const MirrorCoefficients kFifth = MirrorCoefficients::from_transmission(0.2);

constexpr double kTrip = 1e-9; // seconds per round trip in these tests

EnvelopeFunction wide_flat(int samples_per_trip, int trips) {
  const std::size_t n = static_cast<std::size_t>(samples_per_trip) * trips;
  return make_window_envelope(0.0, kTrip / samples_per_trip, n, 0, n);
}

} // namespace

TEST_CASE("envelope basics: norm, normalization, CSV round trip") {
  EnvelopeFunction env = make_window_envelope(0.0, 0.5, 8, 2, 6);
  // Trapezoid of a 0,0,1,1,1,1,0,0 profile with step 0.5.
  CHECK(env.l2_norm_squared() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(env.normalized().l2_norm_squared() == doctest::Approx(1.0).epsilon(1e-13));

  std::stringstream io;
  save_envelope_csv(with_modulation(env, 1.25), io);
  const EnvelopeFunction loaded = load_envelope_csv(io);
  CHECK(loaded.size() == env.size());
  CHECK(loaded.tau_step() == env.tau_step());
  for (std::size_t i = 0; i < env.size(); ++i) {
    CHECK(std::abs(loaded.samples()[i] -
                   with_modulation(env, 1.25).samples()[i]) < 1e-15);
  }

  std::stringstream bad("wrong,header\n1,2,3\n");
  CHECK_THROWS_AS(load_envelope_csv(bad), std::runtime_error);
  CHECK_THROWS_AS(EnvelopeFunction(0.0, -1.0, {{1.0, 0.0}, {1.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("commensurability is enforced with a snapping hint") {
  const EnvelopeFunction env = wide_flat(16, 40);
  CHECK_NOTHROW(windowed_coincidence_amplitude(env, kHalf, 0.0, kTrip, 10));
  try {
    windowed_coincidence_amplitude(env, kHalf, 0.0, 1.3e-9, 10);
    FAIL("expected CommensurabilityError");
  } catch (const CommensurabilityError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nearest commensurate") != std::string::npos);
  }
  CHECK(nearest_commensurate_round_trip(1.3e-9, kTrip / 16.0) ==
        doctest::Approx(1.3125e-9).epsilon(1e-12));
}

TEST_CASE("delta envelope displays the raw path weights") {
  // Single nonzero sample: shifted copies are disjoint, so A carries the
  // weights T^4 R^{4l} at tau_0 - l*trip on the grid.
  const int k = 8;
  const std::size_t n = 400;
  std::vector<std::complex<double>> samples(n, {0.0, 0.0});
  const std::size_t spike = 300;
  samples[spike] = {1.0, 0.0};
  const EnvelopeFunction env(0.0, kTrip / k, std::move(samples));
  const auto transformed = windowed_coincidence_amplitude(env, kHalf, 0.0, kTrip, 50);
  const double t4 = std::pow(0.5, 4);
  const double r4 = std::pow(kHalf.r_field(), 4);
  for (int l = 0; l * k <= static_cast<int>(spike); ++l) {
    const std::size_t idx = spike - static_cast<std::size_t>(l) * k;
    CHECK(std::abs(transformed.samples()[idx]) ==
          doctest::Approx(t4 * std::pow(r4, l)).epsilon(1e-12));
  }
  // Everything off the comb is zero.
  CHECK(std::abs(transformed.samples()[spike - 1]) == 0.0);
  CHECK(std::abs(transformed.samples()[spike + 1]) == 0.0);
}

TEST_CASE("wide flat envelope reproduces the ideal closed form") {
  const EnvelopeFunction env = wide_flat(8, 400);
  for (double theta : {0.0, 1.0, pi}) {
    const double rate = coincidence_rate_from_envelope(env, kHalf, theta, kTrip, 60);
    CHECK(rate == doctest::Approx(transmission_coincidence_rate(kHalf, theta))
                      .epsilon(0.01));
  }
  // Central samples approach T^4/(1-R^4) * phi.
  const auto transformed = windowed_coincidence_amplitude(env, kHalf, 0.0, kTrip, 60);
  const double expected = std::pow(0.5, 4) / (1.0 - std::pow(kHalf.r_field(), 4));
  CHECK(std::abs(transformed.samples()[env.size() / 2]) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("convergence to the ideal rate is monotone in the window size") {
  double previous_error = 1e9;
  for (int trips : {100, 200, 400}) {
    const EnvelopeFunction env = wide_flat(8, trips);
    double worst = 0.0;
    for (double theta : {0.0, 0.7, 2.0, pi}) {
      const double rate = coincidence_rate_from_envelope(env, kHalf, theta, kTrip, 60);
      const double ideal = transmission_coincidence_rate(kHalf, theta);
      worst = std::max(worst, std::abs(rate - ideal) / ideal);
    }
    CHECK(worst < previous_error);
    previous_error = worst;
  }
  CHECK(previous_error < 0.01);
}

TEST_CASE("sub-round-trip envelope gives the flat incoherent power sum") {
  // Support 12 samples < one trip (16 samples): copies are disjoint. The
  // transform shifts copies toward earlier tau, so the support sits at the
  // late end of the grid to keep them all inside.
  const std::size_t n = 16 * 60;
  const EnvelopeFunction env = make_window_envelope(0.0, kTrip / 16.0, n, n - 13, n - 1);
  const double expected = std::pow(0.5, 8) / (1.0 - std::pow(kHalf.r_field(), 8));
  std::vector<double> rates;
  for (int i = 0; i < 40; ++i) {
    const double theta = two_pi * i / 40.0;
    rates.push_back(coincidence_rate_from_envelope(env, kHalf, theta, kTrip, 60));
  }
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= rates.size();
  double variance = 0.0;
  for (double r : rates) variance += (r - mean) * (r - mean);
  variance /= rates.size();
  CHECK(mean == doctest::Approx(expected).epsilon(1e-9));
  CHECK(mean == doctest::Approx(0.0057142857).epsilon(1e-6));
  CHECK(variance < 1e-12);
}

TEST_CASE("linearity: complex rescaling leaves the normalized rate unchanged") {
  const EnvelopeFunction env = wide_flat(8, 120);
  const double base = coincidence_rate_from_envelope(env, kHalf, 1.1, kTrip, 50);
  EnvelopeFunction scaled = env;
  for (auto& s : scaled.samples()) s *= std::complex<double>(0.3, -1.7);
  CHECK(coincidence_rate_from_envelope(scaled, kHalf, 1.1, kTrip, 50) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("shift covariance: translating the support leaves the rate unchanged") {
  // Both supports keep every shifted copy (l <= 50, shift 16) inside the
  // grid, so the transforms are exact translates of each other.
  const std::size_t n = 16 * 120;
  const EnvelopeFunction a = make_window_envelope(0.0, kTrip / 16.0, n, 850, 1100);
  const EnvelopeFunction b = make_window_envelope(0.0, kTrip / 16.0, n, 1650, 1900);
  for (double theta : {0.0, 2.2}) {
    CHECK(coincidence_rate_from_envelope(a, kHalf, theta, kTrip, 50) ==
          doctest::Approx(coincidence_rate_from_envelope(b, kHalf, theta, kTrip, 50))
              .epsilon(1e-12));
  }
}

TEST_CASE("half-FSR modulation swaps resonance and anti-resonance") {
  // Omega * round_trip_time = pi: the rate at theta = 0 becomes the ideal
  // anti-resonant value.
  const EnvelopeFunction modulated =
      with_modulation(wide_flat(8, 300), pi / kTrip);
  CHECK(coincidence_rate_from_envelope(modulated, kHalf, 0.0, kTrip, 60) ==
        doctest::Approx(transmission_coincidence_rate(kHalf, pi)).epsilon(0.01));
  CHECK(coincidence_rate_from_envelope(modulated, kHalf, 0.0, kTrip, 60) ==
        doctest::Approx(0.0016).epsilon(0.01));
}

TEST_CASE("modulation shifts the resonance by -Omega * round_trip_time") {
  const EnvelopeFunction env = wide_flat(8, 300);
  const double omega = 0.3 * two_pi / kTrip; // 0.3 FSR
  const EnvelopeFunction modulated = with_modulation(env, omega);
  // rate_mod(theta) ~ rate_ideal(theta + Omega * trip)
  for (double theta : {0.0, 1.0, 4.0}) {
    const double shifted = reduce_mod_two_pi(theta + omega * kTrip);
    CHECK(coincidence_rate_from_envelope(modulated, kHalf, theta, kTrip, 60) ==
          doctest::Approx(transmission_coincidence_rate(kHalf, shifted)).epsilon(0.02));
  }
  // Peak position on a grid: maximum where theta = -Omega*trip (mod 2pi).
  const int n_scan = 240;
  std::vector<double> thetas(n_scan);
  for (int i = 0; i < n_scan; ++i) thetas[i] = two_pi * i / n_scan;
  const ScanResult scan = phase_scan(modulated, kHalf, thetas, kTrip, 60);
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan.rates[i] > scan.rates[argmax]) argmax = i;
  }
  const double expected_peak = reduce_mod_two_pi(-omega * kTrip);
  CHECK(std::abs(scan.theta_values[argmax] - expected_peak) <= 0.5 * two_pi / n_scan);
}

TEST_CASE("trapezoid quadrature converges under grid refinement") {
  // Smooth Gaussian envelope sampled at two resolutions; the rate must
  // stabilize as the step halves.
  auto gaussian = [](int samples_per_trip) {
    const std::size_t n = static_cast<std::size_t>(samples_per_trip) * 120;
    std::vector<std::complex<double>> s(n);
    const double step = kTrip / samples_per_trip;
    const double center = 60.0 * kTrip;
    const double width = 15.0 * kTrip;
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = step * static_cast<double>(i);
      s[i] = std::exp(-std::pow((tau - center) / width, 2));
    }
    return EnvelopeFunction(0.0, step, std::move(s));
  };
  const double coarse = coincidence_rate_from_envelope(gaussian(8), kHalf, 0.9, kTrip, 50);
  const double fine = coincidence_rate_from_envelope(gaussian(16), kHalf, 0.9, kTrip, 50);
  const double finest =
      coincidence_rate_from_envelope(gaussian(32), kHalf, 0.9, kTrip, 50);
  CHECK(std::abs(fine - finest) < std::abs(coarse - finest));
  CHECK(fine == doctest::Approx(finest).epsilon(1e-4));
}

TEST_CASE("cavity scan sweeps the Airy pattern") {
  const double sum_frequency = 4.8e15;
  const double half_wave = pi * speed_of_light / sum_frequency;
  const double d_ref =
      std::nearbyint(0.005 / half_wave) * half_wave; // resonant reference
  const double trip = 2.0 * d_ref / speed_of_light;

  const std::size_t n_env = 16 * 300;
  const EnvelopeFunction env = make_window_envelope(0.0, trip / 16.0, n_env, 0, n_env);

  const int steps = 64;
  std::vector<double> d_values(steps);
  for (int i = 0; i < steps; ++i) {
    d_values[i] = d_ref + half_wave * static_cast<double>(i) / steps;
  }
  const ScanResult scan = cavity_scan(env, kHalf, d_values, sum_frequency, 60);
  REQUIRE(scan.size() == static_cast<std::size_t>(steps));

  double max_rate = 0.0;
  double min_rate = 1e9;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    max_rate = std::max(max_rate, scan.rates[i]);
    min_rate = std::min(min_rate, scan.rates[i]);
    // theta column consistent with the length column.
    CHECK(scan.theta_values[i] ==
          doctest::Approx(phase_from_geometry(0.5 * sum_frequency, 0.5 * sum_frequency,
                                              scan.d_values[i], scan.d_values[i]))
              .epsilon(1e-12));
  }
  const double r4 = std::pow(kHalf.r_field(), 4);
  CHECK(max_rate / min_rate ==
        doctest::Approx(std::pow((1.0 + r4) / (1.0 - r4), 2)).epsilon(0.05));

  // Narrow envelope: flat scan.
  const EnvelopeFunction narrow =
      make_window_envelope(0.0, trip / 16.0, 16 * 60, 16 * 60 - 13, 16 * 60 - 1);
  const ScanResult flat_scan = cavity_scan(narrow, kHalf, d_values, sum_frequency, 60);
  double lo = 1e9;
  double hi = 0.0;
  for (double r : flat_scan.rates) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo < 1e-10);

  // Lossless mirrors: rate 1 everywhere.
  const ScanResult unity = cavity_scan(
      env, MirrorCoefficients::from_transmission(1.0), d_values, sum_frequency, 10);
  for (double r : unity.rates) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));

  // A grid coarser than the round trip cannot be snapped meaningfully.
  const EnvelopeFunction coarse = make_window_envelope(0.0, 10.0 * trip, 64, 0, 64);
  CHECK_THROWS_AS(cavity_scan(coarse, kHalf, d_values, sum_frequency, 10),
                  CommensurabilityError);
}

TEST_CASE("scan CSV round trip") {
  ScanResult scan;
  scan.d_values = {0.005, 0.0050001};
  scan.theta_values = {0.0, 1.5};
  scan.rates = {0.02, 0.001};
  std::stringstream io;
  save_scan_csv(scan, io);
  const ScanResult loaded = load_scan_csv(io);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.d_values[1] == 0.0050001);
  CHECK(loaded.theta_values[1] == 1.5);
  CHECK(loaded.rates[0] == 0.02);
}

TEST_CASE("spectral readout recovers single and double modulations") {
  const double fsr = two_pi / kTrip;

  SUBCASE("unmodulated envelope reads out at zero offset") {
    const EnvelopeFunction env = wide_flat(8, 300);
    const int n_scan = 400;
    std::vector<double> thetas(n_scan);
    for (int i = 0; i < n_scan; ++i) thetas[i] = two_pi * i / n_scan;
    const ScanResult scan = phase_scan(env, kHalf, thetas, kTrip, 60);
    const SpectralReadout readout = spectral_readout(scan, kHalf, fsr);
    REQUIRE(readout.lines.size() == 1);
    const double offset = readout.lines[0].frequency_offset;
    const double distance = std::min(offset, fsr - offset);
    CHECK(distance < 0.5 * *resonance_linewidth(kHalf) / two_pi * fsr);
  }

  SUBCASE("single modulation at 0.3 FSR") {
    const EnvelopeFunction env =
        with_modulation(make_window_envelope(0.0, kTrip / 16.0, 16 * 800, 0, 16 * 800),
                        0.3 * fsr);
    const int n_scan = 600;
    std::vector<double> thetas(n_scan);
    for (int i = 0; i < n_scan; ++i) thetas[i] = two_pi * i / n_scan;
    const ScanResult scan = phase_scan(env, kFifth, thetas, kTrip, 300);
    const SpectralReadout readout = spectral_readout(scan, kFifth, fsr);
    CHECK(readout.resolved);
    REQUIRE(readout.lines.size() == 1);
    const double half_linewidth = 0.5 * *resonance_linewidth(kFifth) / two_pi * fsr;
    CHECK(std::abs(readout.lines[0].frequency_offset - 0.3 * fsr) < half_linewidth);
  }

  SUBCASE("unresolvable peaks are flagged") {
    // Broad cavity (T=0.7) with two components half an FSR apart.
    const auto broad = MirrorCoefficients::from_transmission(0.7);
    const EnvelopeFunction window =
        make_window_envelope(0.0, kTrip / 16.0, 16 * 200, 0, 16 * 200);
    const EnvelopeFunction env = add_envelopes(with_modulation(window, 0.05 * fsr),
                                               with_modulation(window, 0.30 * fsr));
    const int n_scan = 300;
    std::vector<double> thetas(n_scan);
    for (int i = 0; i < n_scan; ++i) thetas[i] = two_pi * i / n_scan;
    const ScanResult scan = phase_scan(env, broad, thetas, kTrip, 40);
    const SpectralReadout readout = spectral_readout(scan, broad, fsr);
    CHECK_FALSE(readout.resolved);
  }

  SUBCASE("sparse scans are rejected") {
    const EnvelopeFunction env = wide_flat(8, 100);
    std::vector<double> thetas;
    for (int i = 0; i < 50; ++i) thetas.push_back(pi * i / 50.0); // half a period
    const ScanResult scan = phase_scan(env, kHalf, thetas, kTrip, 40);
    CHECK_THROWS_AS(spectral_readout(scan, kHalf, fsr), std::invalid_argument);
  }
}

#include "dcfp/path_oracle.hpp"

#include "dcfp/biphoton.hpp"
#include "dcfp/constants.hpp"
#include "dcfp/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

using namespace dcfp;

namespace {
const MirrorCoefficients kHalf = MirrorCoefficients::from_transmission(0.5);
}

TEST_CASE("path enumeration follows the amplitude convention") {
  const auto paths = enumerate_single_photon_paths(kHalf, 3);
  CHECK(paths.size() == 8);

  double transmit0 = 0.0;
  double reflect0 = 0.0;
  double reflect1 = 0.0;
  for (const auto& p : paths) {
    if (p.port == Port::transmit && p.round_trips == 0) transmit0 = p.amplitude.real();
    if (p.port == Port::reflect && p.round_trips == 0) reflect0 = p.amplitude.real();
    if (p.port == Port::reflect && p.round_trips == 1) reflect1 = p.amplitude.real();
  }
  CHECK(transmit0 == doctest::Approx(0.25).epsilon(1e-15));             // T^2
  CHECK(reflect0 == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-15));  // -R
  CHECK(reflect1 ==
        doctest::Approx(0.25 * std::sqrt(0.75)).epsilon(1e-15));        // T^2 R

  const auto lossless = enumerate_single_photon_paths(
      MirrorCoefficients::from_transmission(1.0), 5);
  CHECK(lossless.size() == 12);
  int nonzero = 0;
  for (const auto& p : lossless) {
    if (std::abs(p.amplitude) > 0.0) {
      ++nonzero;
      CHECK(p.port == Port::transmit);
      CHECK(p.round_trips == 0);
      CHECK(p.amplitude.real() == 1.0);
    }
  }
  CHECK(nonzero == 1);
}

TEST_CASE("single-photon completeness with the analytic tail") {
  SplitStream rng(5, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const double t = 0.05 + 0.9 * rng.next_double();
    const int l_max = static_cast<int>(rng.next_u64() % 40);
    const auto mirrors = MirrorCoefficients::from_transmission(t);
    const auto paths = enumerate_single_photon_paths(mirrors, l_max);
    double total = 0.0;
    for (const auto& p : paths) total += std::norm(p.amplitude);
    CHECK(total + single_photon_tail_bound(mirrors, l_max) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tail bound formula matches direct extended summation") {
  for (double t : {0.3, 0.5, 0.8}) {
    const auto mirrors = MirrorCoefficients::from_transmission(t);
    const int l_max = 6;
    double direct = 0.0;
    for (int l = l_max + 1; l < 4000; ++l) {
      const double r = mirrors.r_field();
      double transmit = t * t;
      for (int i = 0; i < l; ++i) transmit *= r * r;
      double reflect = t * t * r;
      for (int i = 1; i < l; ++i) reflect *= r * r;
      direct += transmit * transmit + reflect * reflect;
    }
    CHECK(single_photon_tail_bound(mirrors, l_max) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("on-resonance single-photon reflection vanishes") {
  for (double t : {0.2, 0.5, 0.7}) {
    const auto mirrors = MirrorCoefficients::from_transmission(t);
    // l_max from the tail bound: amplitudes below 1e-11 past the cut.
    int l_max = 8;
    while (single_photon_tail_bound(mirrors, l_max) > 1e-22 && l_max < 4000) l_max *= 2;
    const auto paths = enumerate_single_photon_paths(mirrors, l_max, 0.0);
    CHECK(std::abs(coherent_port_sum(paths, Port::reflect)) < 1e-10);
    // Off resonance it does not vanish.
    const auto detuned = enumerate_single_photon_paths(mirrors, l_max, 1.0);
    CHECK(std::abs(coherent_port_sum(detuned, Port::reflect)) > 1e-3);
  }
}

TEST_CASE("brute force reproduces the resonant closed forms") {
  CHECK(biphoton_amplitude_bruteforce(kHalf, 0.0, {Channel::TT, 0}, 60).real() ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(biphoton_amplitude_bruteforce(kHalf, 0.0, {Channel::RR, 0}, 60).real() ==
        doctest::Approx(6.0 / 7.0).epsilon(1e-12));

  const auto lossless = MirrorCoefficients::from_transmission(1.0);
  for (const DetectionOutcome outcome :
       {DetectionOutcome{Channel::TT, 1}, DetectionOutcome{Channel::RR, 0},
        DetectionOutcome{Channel::RT, 0}, DetectionOutcome{Channel::TR, -2}}) {
    CHECK(std::abs(biphoton_amplitude_bruteforce(lossless, 0.7, outcome, 10)) == 0.0);
  }
  CHECK(biphoton_amplitude_bruteforce(lossless, 0.7, {Channel::TT, 0}, 0).real() == 1.0);
}

TEST_CASE("oracle equivalence across channels, offsets and phases") {
  SplitStream rng(17, 2);
  for (int trial = 0; trial < 12; ++trial) {
    const double t = 0.25 + 0.6 * rng.next_double();
    const double theta = two_pi * rng.next_double();
    const auto mirrors = MirrorCoefficients::from_transmission(t);
    int l_max = 16;
    while (bruteforce_tail_bound(mirrors, {Channel::RR, 0}, l_max) > 1e-13 &&
           l_max < 100000) {
      l_max *= 2;
    }
    for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
      for (int m = -5; m <= 5; ++m) {
        const auto closed = channel_amplitude(mirrors, theta, {ch, m}).value;
        const auto brute = biphoton_amplitude_bruteforce(mirrors, theta, {ch, m}, l_max);
        CHECK(std::abs(closed - brute) < 1e-11);
      }
    }
  }
}

TEST_CASE("separable baseline: flat, offset-resolved, consistent") {
  const auto baseline = separable_coincidence_baseline(kHalf, 400);

  // Product of the marginal transmission probabilities (T^4/(1-R^4))^2.
  CHECK(baseline.coincidence_rate == doctest::Approx(1.0 / 49.0).epsilon(1e-12));
  // Strictly simultaneous exits: T^8/(1-R^8).
  CHECK(baseline.per_offset_rates.at(0) ==
        doctest::Approx(0.00390625 / 0.68359375).epsilon(1e-12));
  // Offset split sums back to the total.
  double sum = 0.0;
  for (const auto& [m, rate] : baseline.per_offset_rates) sum += rate;
  CHECK(sum == doctest::Approx(baseline.coincidence_rate).epsilon(1e-10));
  // Geometric decay per offset: ratio R^4.
  CHECK(baseline.per_offset_rates.at(2) / baseline.per_offset_rates.at(1) ==
        doctest::Approx(std::pow(kHalf.r_field(), 4)).epsilon(1e-10));
  CHECK(baseline.per_offset_rates.at(-3) ==
        doctest::Approx(baseline.per_offset_rates.at(3)).epsilon(1e-12));

  const auto lossless = separable_coincidence_baseline(
      MirrorCoefficients::from_transmission(1.0), 50);
  CHECK(lossless.coincidence_rate == 1.0);
  CHECK(lossless.per_offset_rates.at(0) == 1.0);
  CHECK(lossless.per_offset_rates.at(1) == 0.0);

  const auto fifth = separable_coincidence_baseline(
      MirrorCoefficients::from_transmission(0.2), 2000);
  CHECK(fifth.coincidence_rate == doctest::Approx(1.0 / 49.0 / 49.0).epsilon(1e-9));
}

TEST_CASE("entangled-to-baseline contrast follows the closed form") {
  // baseline = T^8/(1-R^4)^2; entangled/baseline = (1-R^4)^2/|D|^2.
  const auto baseline = separable_coincidence_baseline(kHalf, 400);
  const double r4 = std::pow(kHalf.r_field(), 4);
  for (double theta : {0.0, 0.5, 1.5, pi, 4.0}) {
    const double ratio =
        transmission_coincidence_rate(kHalf, theta) / baseline.coincidence_rate;
    const double expected = std::pow(1.0 - r4, 2) /
                            (1.0 + r4 * r4 - 2.0 * r4 * std::cos(theta));
    CHECK(ratio == doctest::Approx(expected).epsilon(1e-10));
  }
  // The baseline coincides with the entangled peak at resonance.
  CHECK(transmission_coincidence_rate(kHalf, 0.0) ==
        doctest::Approx(baseline.coincidence_rate).epsilon(1e-10));
}

TEST_CASE("compare_with_closed_form verdicts") {
  std::vector<DetectionOutcome> outcomes;
  for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
    for (int m = -5; m <= 5; ++m) outcomes.push_back({ch, m});
  }

  SUBCASE("well-truncated comparison passes") {
    const auto report = compare_with_closed_form(kHalf, 1.3, outcomes, 80, 1e-10);
    CHECK(report.all_pass());
    CHECK(report.entries.size() == outcomes.size());
    for (const auto& entry : report.entries) {
      CHECK(entry.tail_bound < 1e-10);
      CHECK(entry.deviation <= 1e-10);
    }
  }

  SUBCASE("tail beyond the tolerance is reported as failure") {
    const auto nearly_closed = MirrorCoefficients::from_transmission(0.1);
    const auto report =
        compare_with_closed_form(nearly_closed, pi / 3.0, outcomes, 10, 1e-12);
    CHECK_FALSE(report.all_pass());
    CHECK_FALSE(report.failures().empty());
    for (const auto& entry : report.failures()) {
      CHECK(entry.tail_bound >= 1e-12);
    }
  }

  SUBCASE("lossless mirrors pass with no round trips at all") {
    const auto lossless = MirrorCoefficients::from_transmission(1.0);
    const auto report = compare_with_closed_form(lossless, 0.0, outcomes, 0, 1e-15);
    CHECK(report.all_pass());
  }
}

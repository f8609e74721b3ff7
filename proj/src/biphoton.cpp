#include "dcfp/biphoton.hpp"

#include "dcfp/constants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace dcfp {

namespace {

double ipow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

// 1 - R^4 without cancellation: (1 - R^2)(1 + R^2) = T^2 (1 + R^2).
double one_minus_r4(double t_field, double r_field) {
  return t_field * t_field * (1.0 + r_field * r_field);
}

// 1 - R^4 e^{i theta}, real part rearranged as
// (1 - R^4) + 2 R^4 sin^2(theta/2) to stay exact near resonance.
std::complex<double> airy_denominator(double t_field, double r_field, double theta) {
  const double r4 = ipow(r_field, 4);
  const double s = std::sin(0.5 * theta);
  return {one_minus_r4(t_field, r_field) + 2.0 * r4 * s * s, -r4 * std::sin(theta)};
}

// -1 + R^2 e^{i theta}, real part as -(T^2 + 2 R^2 sin^2(theta/2)).
std::complex<double> reflection_factor(double t_field, double r_field, double theta) {
  const double t2 = t_field * t_field;
  const double r2 = r_field * r_field;
  const double s = std::sin(0.5 * theta);
  return {-(t2 + 2.0 * r2 * s * s), r2 * std::sin(theta)};
}

constexpr int kHardOffsetCap = 1000000;

} // namespace

double transmission_coincidence_rate(const MirrorCoefficients& mirrors, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  const double t2 = mirrors.t_field() * mirrors.t_field();
  const double t4 = t2 * t2;
  const double r4 = ipow(mirrors.r_field(), 4);
  const double s = std::sin(0.5 * theta);
  const double a = one_minus_r4(mirrors.t_field(), mirrors.r_field());
  // 1 + R^8 - 2 R^4 cos(theta) rearranged as (1-R^4)^2 + 4 R^4 sin^2(theta/2).
  const double denom = a * a + 4.0 * r4 * s * s;
  return t4 * t4 / denom;
}

JointAmplitude channel_amplitude(const MirrorCoefficients& mirrors, double theta,
                                 DetectionOutcome outcome) {
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  const double t = mirrors.t_field();
  const double r = mirrors.r_field();
  const double t2 = t * t;
  const double t4 = t2 * t2;
  const double r2 = r * r;
  const int m = outcome.offset_m;
  const int am = std::abs(m);

  const std::complex<double> denom = airy_denominator(t, r, theta);

  // T = 0 exactly on resonance: every channel formula is 0/0. The analytic
  // limit keeps only the prompt double reflection.
  if (t == 0.0 && denom == std::complex<double>(0.0, 0.0)) {
    const double limit = (outcome.channel == Channel::RR && m == 0) ? 1.0 : 0.0;
    return JointAmplitude{{limit, 0.0}, outcome, true};
  }

  std::complex<double> numerator;
  switch (outcome.channel) {
    case Channel::TT:
      numerator = t4 * ipow(r2, am);
      break;
    case Channel::RR:
      if (m == 0) {
        // R^2 (1 - (R^2 - T^2) e^{i theta}); the real part is written as
        // 2 T^2 + 2 (R^2 - T^2) sin^2(theta/2) so the resonant value stays
        // exact. The prompt double reflection enters with a plus sign: the
        // external half-wave minus sign is squared away.
        const double a = r2 - t2;
        const double s = std::sin(0.5 * theta);
        numerator = r2 * std::complex<double>(2.0 * t2 + 2.0 * a * s * s, -a * std::sin(theta));
      } else {
        numerator = t2 * ipow(r2, am) * reflection_factor(t, r, theta);
      }
      break;
    case Channel::RT:
      if (m >= 0) {
        numerator = t2 * r * ipow(r2, m) * reflection_factor(t, r, theta);
      } else {
        numerator = t4 * r * ipow(r2, am - 1);
      }
      break;
    case Channel::TR:
      // Arms swapped relative to RT: the reflected-arm click now sits on the
      // right, so the roles of the two offset signs flip.
      if (m <= 0) {
        numerator = t2 * r * ipow(r2, am) * reflection_factor(t, r, theta);
      } else {
        numerator = t4 * r * ipow(r2, m - 1);
      }
      break;
  }

  return JointAmplitude{numerator / denom, outcome, false};
}

double ChannelDistribution::probability(const DetectionOutcome& outcome) const {
  for (const auto& [key, p] : probabilities) {
    if (key == outcome) return p;
  }
  return 0.0;
}

double ChannelDistribution::total() const {
  double sum = 0.0;
  for (const auto& [key, p] : probabilities) sum += p;
  return sum;
}

namespace {

// |-1 + R^2 e^{i theta}|^2 = T^4 + 4 R^2 sin^2(theta/2).
double reflection_factor_sq(double t_field, double r_field, double theta) {
  const double s = std::sin(0.5 * theta);
  return ipow(t_field, 4) + 4.0 * r_field * r_field * s * s;
}

double airy_denominator_sq(double t_field, double r_field, double theta) {
  const double a = one_minus_r4(t_field, r_field);
  const double r4 = ipow(r_field, 4);
  const double s = std::sin(0.5 * theta);
  return a * a + 4.0 * r4 * s * s;
}

} // namespace

double distribution_tail_bound(const MirrorCoefficients& mirrors, double theta,
                               int max_offset) {
  if (max_offset < 0) throw std::invalid_argument("max_offset must be non-negative");
  const double t = mirrors.t_field();
  const double r = mirrors.r_field();
  if (r == 0.0) return 0.0; // single path, no tail
  if (t == 0.0) return 0.0; // every |m| > 0 channel carries a factor T^4
  const double t4 = ipow(t, 4);
  const double t8 = t4 * t4;
  const double r2 = r * r;
  const double beta = r2 * r2; // per-|m| probability ratio R^4
  const double refl_sq = reflection_factor_sq(t, r, theta);
  const double denom_sq = airy_denominator_sq(t, r, theta);
  // Geometric sums of every channel's probabilities beyond |m| = M. The
  // per-channel moduli carry no cross-offset interference, so this "bound"
  // is the exact discarded probability at every theta.
  const double inner = beta * (t8 + t4 * refl_sq * (1.0 + r2)) + t8 * r2;
  return 2.0 * ipow(beta, max_offset) * inner / ((1.0 - beta) * denom_sq);
}

ChannelDistribution channel_distribution(const MirrorCoefficients& mirrors,
                                         double theta, double tail_tolerance) {
  if (!(tail_tolerance > 0.0)) {
    throw std::invalid_argument("tail_tolerance must be positive");
  }
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");

  const double t = mirrors.t_field();
  const double r = mirrors.r_field();

  ChannelDistribution dist;

  if (t == 0.0) {
    // Perfect mirrors: both photons promptly reflect, always coincident.
    for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
      dist.probabilities.push_back({DetectionOutcome{ch, 0},
                                    ch == Channel::RR ? 1.0 : 0.0});
    }
    return dist;
  }

  // Smallest M whose analytic tail drops below the tolerance.
  int max_offset = 0;
  const double beta = ipow(r, 4);
  const double tail0 = distribution_tail_bound(mirrors, theta, 0);
  if (tail0 > tail_tolerance) {
    const double wanted =
        std::ceil(std::log(tail_tolerance / tail0) / std::log(beta));
    if (!(wanted <= static_cast<double>(kHardOffsetCap))) {
      throw std::runtime_error(
          "channel_distribution: tail tolerance unreachable within the offset cap "
          "(R too close to 1)");
    }
    max_offset = std::max(0, static_cast<int>(wanted));
  }
  while (max_offset <= kHardOffsetCap &&
         distribution_tail_bound(mirrors, theta, max_offset) > tail_tolerance) {
    ++max_offset;
  }
  if (max_offset > kHardOffsetCap) {
    throw std::runtime_error(
        "channel_distribution: tail tolerance unreachable within the offset cap "
        "(R too close to 1)");
  }

  const int M = max_offset;
  const double t2 = t * t;
  const double t4 = t2 * t2;
  const double t8 = t4 * t4;
  const double r2 = r * r;
  const double refl_sq = reflection_factor_sq(t, r, theta);
  const double denom_sq = airy_denominator_sq(t, r, theta);

  const double rr0 = std::norm(channel_amplitude(mirrors, theta,
                                                 {Channel::RR, 0}).value);

  std::vector<double> beta_pow(static_cast<std::size_t>(M) + 1);
  beta_pow[0] = 1.0;
  for (std::size_t k = 1; k < beta_pow.size(); ++k) beta_pow[k] = beta_pow[k - 1] * beta;

  auto probability = [&](Channel ch, int m) -> double {
    const int am = std::abs(m);
    switch (ch) {
      case Channel::TT:
        return t8 * beta_pow[am] / denom_sq;
      case Channel::RR:
        return m == 0 ? rr0 : t4 * refl_sq * beta_pow[am] / denom_sq;
      case Channel::RT:
        return m >= 0 ? t4 * r2 * refl_sq * beta_pow[m] / denom_sq
                      : t8 * r2 * beta_pow[am - 1] / denom_sq;
      case Channel::TR:
        return m <= 0 ? t4 * r2 * refl_sq * beta_pow[am] / denom_sq
                      : t8 * r2 * beta_pow[m - 1] / denom_sq;
    }
    return 0.0;
  };

  dist.max_offset = M;
  dist.tail_bound = distribution_tail_bound(mirrors, theta, M);
  dist.probabilities.reserve(4 * (2 * static_cast<std::size_t>(M) + 1));
  for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
    for (int m = -M; m <= M; ++m) {
      dist.probabilities.push_back({DetectionOutcome{ch, m}, probability(ch, m)});
    }
  }
  return dist;
}

std::optional<double> resonance_linewidth(const MirrorCoefficients& mirrors) {
  const double r = mirrors.r_field();
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("linewidth defined for 0 < R < 1");
  }
  const double r2 = r * r;
  const double arg = one_minus_r4(mirrors.t_field(), r) / (2.0 * r2);
  if (arg > 1.0) return std::nullopt;
  return 4.0 * std::asin(arg);
}

} // namespace dcfp

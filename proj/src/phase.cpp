#include "dcfp/phase.hpp"

#include "dcfp/constants.hpp"

#include <cmath>

namespace dcfp {

namespace {

// Double-double helpers (Dekker/Knuth error-free transforms). A value is
// carried as an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

DD two_prod(double a, double b) {
  const double p = a * b;
  const double err = std::fma(a, b, -p);
  return {p, err};
}

DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  DD r = two_sum(s.hi, lo);
  return r;
}

DD dd_mul_d(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return two_sum(p.hi, p.lo);
}

DD dd_div_d(DD a, double b) {
  const double q1 = a.hi / b;
  DD p = two_prod(q1, b);
  const double r_hi = a.hi - p.hi;
  const double r_lo = a.lo - p.lo;
  const double q2 = (r_hi + r_lo) / b;
  return two_sum(q1, q2);
}

// 2*pi split so that hi + lo carries ~107 correct bits.
constexpr double kTwoPiHi = 6.283185307179586232e+00;
constexpr double kTwoPiLo = 2.449293598294706414e-16;

// Beyond this unreduced magnitude the integer quotient against 2*pi stops
// being exactly representable in the reduction products.
constexpr double kSafeReductionRange = 5.62949953421312e14; // 2^49

// Reduce a double-double angle to [0, 2*pi), returned collapsed to double.
double dd_reduce_two_pi(DD x) {
  const double q = std::nearbyint(x.hi / kTwoPiHi);
  // r = x - q * (2*pi), with q * 2pi expanded in double-double.
  DD qp = two_prod(q, kTwoPiHi);
  qp = dd_add(qp, two_prod(q, kTwoPiLo));
  DD r = dd_add(x, DD{-qp.hi, -qp.lo});
  double v = r.hi + r.lo;
  if (v < 0.0) v += two_pi;
  if (v >= two_pi) v -= two_pi;
  return v;
}

} // namespace

double reduce_mod_two_pi(double angle) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("angle must be finite");
  }
  return dd_reduce_two_pi(DD{angle, 0.0});
}

double phase_from_geometry(double omega_left, double omega_right,
                           double d_left, double d_right) {
  if (!(omega_left > 0.0 && omega_right > 0.0 && d_left > 0.0 && d_right > 0.0) ||
      !(std::isfinite(omega_left) && std::isfinite(omega_right) &&
        std::isfinite(d_left) && std::isfinite(d_right))) {
    throw std::invalid_argument("frequencies and lengths must be positive and finite");
  }
  DD sum = dd_add(two_prod(omega_left, d_left), two_prod(omega_right, d_right));
  sum = dd_mul_d(sum, 2.0);
  DD phase = dd_div_d(sum, speed_of_light);
  if (std::abs(phase.hi) > kSafeReductionRange) {
    throw PhaseRangeError("unreduced phase exceeds the safe double-double reduction range");
  }
  return dd_reduce_two_pi(phase);
}

double resonance_distance(double theta) {
  const double t = reduce_mod_two_pi(theta);
  return std::min(t, two_pi - t);
}

} // namespace dcfp

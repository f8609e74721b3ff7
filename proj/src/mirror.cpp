#include "dcfp/mirror.hpp"

#include "dcfp/constants.hpp"

#include <cmath>
#include <limits>

namespace dcfp {

namespace {
constexpr double kUnitarityTolerance = 1e-12;
}

MirrorCoefficients::MirrorCoefficients(double t_field, double r_field)
    : t_(t_field), r_(r_field) {
  if (!(std::isfinite(t_) && std::isfinite(r_))) {
    throw std::invalid_argument("mirror coefficients must be finite");
  }
  if (t_ < 0.0 || r_ < 0.0) {
    throw std::invalid_argument("mirror coefficients must be non-negative");
  }
  const double closure = t_ * t_ + r_ * r_ - 1.0;
  if (std::abs(closure) > kUnitarityTolerance) {
    throw std::invalid_argument("mirror coefficients violate T^2 + R^2 = 1");
  }
}

MirrorCoefficients MirrorCoefficients::from_transmission(double t_field) {
  if (!(t_field >= 0.0 && t_field <= 1.0)) {
    throw std::invalid_argument("field transmission must lie in [0, 1]");
  }
  return MirrorCoefficients(t_field, std::sqrt(std::max(0.0, (1.0 - t_field) * (1.0 + t_field))));
}

MirrorCoefficients MirrorCoefficients::from_reflection(double r_field) {
  if (!(r_field >= 0.0 && r_field <= 1.0)) {
    throw std::invalid_argument("field reflection must lie in [0, 1]");
  }
  return MirrorCoefficients(std::sqrt(std::max(0.0, (1.0 - r_field) * (1.0 + r_field))), r_field);
}

double MirrorCoefficients::finesse() const {
  const double r2 = r_ * r_;
  const double r4 = r2 * r2;
  if (r4 >= 1.0) return std::numeric_limits<double>::infinity();
  return pi * r2 / (1.0 - r4);
}

} // namespace dcfp

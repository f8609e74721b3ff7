#include "dcfp/geometry.hpp"

#include "dcfp/constants.hpp"
#include "dcfp/phase.hpp"

#include <cmath>
#include <stdexcept>

namespace dcfp {

namespace {
// Margin in "small compared to the pulse length".
constexpr double kGeometryMargin = 0.1;
}

InterferometerConfig::InterferometerConfig(double d_left, double d_right,
                                           double omega_left, double omega_right,
                                           double pulse_length)
    : d_left_(d_left), d_right_(d_right),
      omega_left_(omega_left), omega_right_(omega_right),
      pulse_length_(pulse_length) {
  if (!(d_left_ > 0.0 && d_right_ > 0.0)) {
    throw std::invalid_argument("cavity lengths must be positive");
  }
  if (!(omega_left_ > 0.0 && omega_right_ > 0.0)) {
    throw std::invalid_argument("angular frequencies must be positive");
  }
  if (!(pulse_length_ > 0.0) || !std::isfinite(pulse_length_)) {
    throw std::invalid_argument("pulse length must be positive and finite");
  }
  theta_ = phase_from_geometry(omega_left_, omega_right_, d_left_, d_right_);
}

bool InterferometerConfig::geometry_valid(const MirrorCoefficients& mirrors) const {
  const double blur = mirrors.finesse() * std::abs(d_left_ - d_right_);
  return blur <= kGeometryMargin * pulse_length_;
}

double InterferometerConfig::round_trip_time_left() const {
  return 2.0 * d_left_ / speed_of_light;
}

bool on_resonance(const InterferometerConfig& config, double tolerance) {
  if (!(tolerance >= 0.0)) {
    throw std::invalid_argument("tolerance must be non-negative");
  }
  return resonance_distance(config.theta()) <= 2.0 * tolerance;
}

} // namespace dcfp

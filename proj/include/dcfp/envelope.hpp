#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dcfp {

/// Entanglement envelope phi(tau) sampled on a uniform grid. Carries the
/// fine time-frequency structure of the pair state; everything the rates
/// need is |phi| and its phase on this grid.
class EnvelopeFunction {
public:
  EnvelopeFunction(double tau_start, double tau_step,
                   std::vector<std::complex<double>> samples);

  double tau_start() const { return tau_start_; }
  double tau_step() const { return tau_step_; }
  double tau_at(std::size_t i) const { return tau_start_ + tau_step_ * static_cast<double>(i); }
  std::size_t size() const { return samples_.size(); }
  const std::vector<std::complex<double>>& samples() const { return samples_; }
  std::vector<std::complex<double>>& samples() { return samples_; }

  /// Trapezoidal integral of |phi|^2 over the grid.
  double l2_norm_squared() const;

  /// Copy rescaled so the trapezoidal L2 norm is 1.
  EnvelopeFunction normalized() const;

private:
  double tau_start_;
  double tau_step_;
  std::vector<std::complex<double>> samples_;
};

// Unit-amplitude window: 1 on sample indexes [support_begin, support_end),
// 0 elsewhere.
EnvelopeFunction make_window_envelope(double tau_start, double tau_step,
                                      std::size_t n_samples,
                                      std::size_t support_begin,
                                      std::size_t support_end);

// Multiply by the pure modulation e^{i omega tau}.
EnvelopeFunction with_modulation(const EnvelopeFunction& envelope, double omega);

// Sample-wise sum; grids must match exactly.
EnvelopeFunction add_envelopes(const EnvelopeFunction& a, const EnvelopeFunction& b);

// CSV with mandatory header "tau_seconds,re,im".
EnvelopeFunction load_envelope_csv(std::istream& in);
EnvelopeFunction load_envelope_csv_file(const std::string& path);
void save_envelope_csv(const EnvelopeFunction& envelope, std::ostream& out);
void save_envelope_csv_file(const EnvelopeFunction& envelope, const std::string& path);

} // namespace dcfp

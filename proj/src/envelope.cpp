#include "dcfp/envelope.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcfp {

EnvelopeFunction::EnvelopeFunction(double tau_start, double tau_step,
                                   std::vector<std::complex<double>> samples)
    : tau_start_(tau_start), tau_step_(tau_step), samples_(std::move(samples)) {
  if (!(tau_step_ > 0.0) || !std::isfinite(tau_step_) || !std::isfinite(tau_start_)) {
    throw std::invalid_argument("envelope grid must have a positive finite step");
  }
  if (samples_.size() < 2) {
    throw std::invalid_argument("envelope needs at least 2 samples");
  }
}

double EnvelopeFunction::l2_norm_squared() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double w = (i == 0 || i + 1 == samples_.size()) ? 0.5 : 1.0;
    sum += w * std::norm(samples_[i]);
  }
  return sum * tau_step_;
}

EnvelopeFunction EnvelopeFunction::normalized() const {
  const double n2 = l2_norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument("envelope has no positive finite L2 norm");
  }
  const double scale = 1.0 / std::sqrt(n2);
  std::vector<std::complex<double>> scaled = samples_;
  for (auto& s : scaled) s *= scale;
  return EnvelopeFunction(tau_start_, tau_step_, std::move(scaled));
}

EnvelopeFunction make_window_envelope(double tau_start, double tau_step,
                                      std::size_t n_samples,
                                      std::size_t support_begin,
                                      std::size_t support_end) {
  if (support_end > n_samples || support_begin >= support_end) {
    throw std::invalid_argument("window support must be a non-empty range inside the grid");
  }
  std::vector<std::complex<double>> samples(n_samples, {0.0, 0.0});
  for (std::size_t i = support_begin; i < support_end; ++i) samples[i] = {1.0, 0.0};
  return EnvelopeFunction(tau_start, tau_step, std::move(samples));
}

EnvelopeFunction with_modulation(const EnvelopeFunction& envelope, double omega) {
  std::vector<std::complex<double>> samples = envelope.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double phase = omega * envelope.tau_at(i);
    samples[i] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return EnvelopeFunction(envelope.tau_start(), envelope.tau_step(), std::move(samples));
}

EnvelopeFunction add_envelopes(const EnvelopeFunction& a, const EnvelopeFunction& b) {
  if (a.tau_start() != b.tau_start() || a.tau_step() != b.tau_step() ||
      a.size() != b.size()) {
    throw std::invalid_argument("envelope grids do not match");
  }
  std::vector<std::complex<double>> samples = a.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += b.samples()[i];
  return EnvelopeFunction(a.tau_start(), a.tau_step(), std::move(samples));
}

EnvelopeFunction load_envelope_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("envelope CSV is empty");
  }
  // Tolerate comment lines above the header.
  while (!line.empty() && line[0] == '#') {
    if (!std::getline(in, line)) throw std::runtime_error("envelope CSV has no header");
  }
  if (line != "tau_seconds,re,im") {
    throw std::runtime_error("envelope CSV header must be 'tau_seconds,re,im'");
  }
  std::vector<double> taus;
  std::vector<std::complex<double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double values[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(row, field, ',')) {
        throw std::runtime_error("envelope CSV row has fewer than 3 fields: " + line);
      }
      try {
        values[k] = std::stod(field);
      } catch (const std::exception&) {
        throw std::runtime_error("envelope CSV field is not a number: " + field);
      }
    }
    taus.push_back(values[0]);
    samples.emplace_back(values[1], values[2]);
  }
  if (taus.size() < 2) {
    throw std::runtime_error("envelope CSV needs at least 2 samples");
  }
  const double step = taus[1] - taus[0];
  if (!(step > 0.0)) throw std::runtime_error("envelope CSV tau column must increase");
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const double expected = taus[0] + step * static_cast<double>(i);
    if (std::abs(taus[i] - expected) > 1e-6 * step) {
      throw std::runtime_error("envelope CSV grid is not uniform");
    }
  }
  return EnvelopeFunction(taus[0], step, std::move(samples));
}

EnvelopeFunction load_envelope_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open envelope file: " + path);
  return load_envelope_csv(in);
}

void save_envelope_csv(const EnvelopeFunction& envelope, std::ostream& out) {
  out << "tau_seconds,re,im\n";
  char buf[128];
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", envelope.tau_at(i),
                  envelope.samples()[i].real(), envelope.samples()[i].imag());
    out << buf;
  }
}

void save_envelope_csv_file(const EnvelopeFunction& envelope, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save_envelope_csv(envelope, out);
}

} // namespace dcfp

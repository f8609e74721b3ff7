#include "dcfp/clicksim.hpp"

#include "dcfp/constants.hpp"
#include "dcfp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dcfp {

namespace {

constexpr double kSampleTailTolerance = 1e-9;

// Substream id layout: pair j uses ids 2j (outcome draw) and 2j+1 (click
// emission); dark-count processes live in a disjoint high range.
std::uint64_t outcome_stream_id(std::uint64_t pair) { return 2 * pair; }
std::uint64_t emission_stream_id(std::uint64_t pair) { return 2 * pair + 1; }
std::uint64_t dark_stream_id(std::size_t detector) {
  return (1ULL << 62) + detector;
}

DetectorId left_detector(Channel ch) {
  return (ch == Channel::TT || ch == Channel::TR) ? DetectorId::L1 : DetectorId::L2;
}

DetectorId right_detector(Channel ch) {
  return (ch == Channel::TT || ch == Channel::RT) ? DetectorId::R1 : DetectorId::R2;
}

Channel channel_of(DetectorId left, DetectorId right) {
  if (left == DetectorId::L1) {
    return right == DetectorId::R1 ? Channel::TT : Channel::TR;
  }
  return right == DetectorId::R1 ? Channel::RT : Channel::RR;
}

} // namespace

const char* to_string(DetectorId id) {
  switch (id) {
    case DetectorId::L1: return "L1";
    case DetectorId::L2: return "L2";
    case DetectorId::R1: return "R1";
    case DetectorId::R2: return "R2";
  }
  return "??";
}

std::optional<DetectorId> detector_from_string(const std::string& name) {
  if (name == "L1") return DetectorId::L1;
  if (name == "L2") return DetectorId::L2;
  if (name == "R1") return DetectorId::R1;
  if (name == "R2") return DetectorId::R2;
  return std::nullopt;
}

void DetectorModel::validate() const {
  for (double eta : efficiency) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    }
  }
  if (!(timing_jitter_sigma >= 0.0) || !std::isfinite(timing_jitter_sigma)) {
    throw std::invalid_argument("timing jitter must be non-negative and finite");
  }
  if (!(dark_count_rate >= 0.0) || !std::isfinite(dark_count_rate)) {
    throw std::invalid_argument("dark count rate must be non-negative and finite");
  }
}

std::uint64_t CoincidenceHistogram::count(Channel channel, int offset_m) const {
  const auto it = bins.find({channel, offset_m});
  return it == bins.end() ? 0 : it->second;
}

std::uint64_t CoincidenceHistogram::total_counts() const {
  std::uint64_t sum = 0;
  for (const auto& [key, c] : bins) sum += c;
  return sum;
}

std::vector<DetectionOutcome> sample_pair_outcomes(const MirrorCoefficients& mirrors,
                                                   double theta,
                                                   std::uint64_t n_pairs,
                                                   std::uint64_t seed) {
  if (n_pairs == 0) throw std::invalid_argument("n_pairs must be at least 1");
  const ChannelDistribution dist =
      channel_distribution(mirrors, theta, kSampleTailTolerance);

  const double total = dist.total();
  std::vector<double> cdf;
  cdf.reserve(dist.probabilities.size());
  double acc = 0.0;
  for (const auto& [outcome, p] : dist.probabilities) {
    acc += p / total;
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;

  std::vector<DetectionOutcome> outcomes;
  outcomes.reserve(n_pairs);
  for (std::uint64_t j = 0; j < n_pairs; ++j) {
    const double u = SplitStream(seed, outcome_stream_id(j)).next_double();
    const std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    outcomes.push_back(dist.probabilities[std::min(idx, cdf.size() - 1)].first);
  }
  return outcomes;
}

std::vector<ClickEvent> emit_click_streams(std::span<const DetectionOutcome> outcomes,
                                           double round_trip_time,
                                           double pair_interval,
                                           const DetectorModel& detectors,
                                           std::uint64_t seed) {
  detectors.validate();
  if (!(round_trip_time > 0.0)) {
    throw std::invalid_argument("round_trip_time must be positive");
  }
  int max_abs_m = 0;
  for (const DetectionOutcome& o : outcomes) {
    max_abs_m = std::max(max_abs_m, std::abs(o.offset_m));
  }
  if (!(pair_interval > (max_abs_m + 2) * round_trip_time)) {
    throw std::invalid_argument(
        "pair_interval must exceed (max |m| + 2) round trips to keep pairs "
        "from aliasing");
  }
  if (!(detectors.timing_jitter_sigma <= 0.125 * pair_interval)) {
    throw std::invalid_argument(
        "timing jitter sigma above pair_interval/8 would alias pairs");
  }

  // Pair j is emitted at (j+1) * pair_interval, so even heavily jittered
  // clicks keep non-negative timestamps.
  std::vector<ClickEvent> stream;
  stream.reserve(2 * outcomes.size());
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    const DetectionOutcome& outcome = outcomes[j];
    const double base = static_cast<double>(j + 1) * pair_interval;
    const int m = outcome.offset_m;
    const DetectorId left = left_detector(outcome.channel);
    const DetectorId right = right_detector(outcome.channel);
    const double t_left = base + std::max(0, -m) * round_trip_time;
    const double t_right = base + std::max(0, m) * round_trip_time;

    SplitStream rng(seed, emission_stream_id(j));
    const double u_left = rng.next_double();
    const double u_right = rng.next_double();
    double jitter_left = 0.0;
    double jitter_right = 0.0;
    if (detectors.timing_jitter_sigma > 0.0) {
      const auto [z1, z2] = rng.next_gaussian_pair();
      jitter_left = detectors.timing_jitter_sigma * z1;
      jitter_right = detectors.timing_jitter_sigma * z2;
    }
    if (u_left < detectors.efficiency_of(left)) {
      stream.push_back({left, t_left + jitter_left});
    }
    if (u_right < detectors.efficiency_of(right)) {
      stream.push_back({right, t_right + jitter_right});
    }
  }

  if (detectors.dark_count_rate > 0.0) {
    const double span = static_cast<double>(outcomes.size() + 1) * pair_interval;
    for (std::size_t k = 0; k < 4; ++k) {
      SplitStream rng(seed, dark_stream_id(k));
      double t = 0.0;
      for (;;) {
        t += -std::log(rng.next_double_open()) / detectors.dark_count_rate;
        if (t >= span) break;
        stream.push_back({static_cast<DetectorId>(k), t});
      }
    }
  }

  std::sort(stream.begin(), stream.end(), [](const ClickEvent& a, const ClickEvent& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.detector < b.detector;
  });
  return stream;
}

CoincidenceHistogram build_histogram(std::span<const ClickEvent> stream,
                                     double round_trip_time,
                                     double matching_window,
                                     int max_offset,
                                     std::uint64_t total_pairs_emitted) {
  if (!(round_trip_time > 0.0)) {
    throw std::invalid_argument("round_trip_time must be positive");
  }
  if (!(matching_window > 0.0 && matching_window < 0.5 * round_trip_time)) {
    throw std::invalid_argument(
        "matching_window must lie in (0, round_trip_time / 2) for unambiguous bins");
  }
  if (max_offset < 0) throw std::invalid_argument("max_offset must be non-negative");

  struct Click {
    double time;
    DetectorId detector;
    bool used = false;
  };
  std::vector<Click> lefts;
  std::vector<Click> rights;
  for (const ClickEvent& c : stream) {
    (is_left_arm(c.detector) ? lefts : rights).push_back({c.timestamp, c.detector});
  }
  const auto by_time = [](const Click& a, const Click& b) { return a.time < b.time; };
  std::sort(lefts.begin(), lefts.end(), by_time);
  std::sort(rights.begin(), rights.end(), by_time);

  CoincidenceHistogram hist;
  hist.bin_width = matching_window;
  hist.total_pairs_emitted = total_pairs_emitted;
  hist.max_offset = max_offset;

  const double reach = max_offset * round_trip_time + matching_window;
  std::size_t window_begin = 0;
  for (Click& left : lefts) {
    // Right-arm candidates inside [t_L - reach, t_L + reach].
    while (window_begin < rights.size() && rights[window_begin].time < left.time - reach) {
      ++window_begin;
    }
    std::size_t best = rights.size();
    double best_residual = matching_window;
    int best_m = 0;
    for (std::size_t i = window_begin; i < rights.size(); ++i) {
      if (rights[i].time > left.time + reach) break;
      if (rights[i].used) continue;
      const double dt = rights[i].time - left.time;
      const double m_real = std::nearbyint(dt / round_trip_time);
      if (std::abs(m_real) > max_offset) continue;
      const int m = static_cast<int>(m_real);
      const double residual = std::abs(dt - m_real * round_trip_time);
      if (residual <= best_residual) {
        best = i;
        best_residual = residual;
        best_m = m;
      }
    }
    if (best < rights.size()) {
      rights[best].used = true;
      left.used = true;
      ++hist.bins[{channel_of(left.detector, rights[best].detector), best_m}];
    } else {
      ++hist.unmatched_left;
    }
  }
  for (const Click& r : rights) {
    if (!r.used) ++hist.unmatched_right;
  }
  return hist;
}

std::map<DetectionOutcome, RateEstimate> estimate_rates(
    const CoincidenceHistogram& hist, std::uint64_t n_pairs,
    const std::optional<DetectorModel>& correct_for) {
  if (n_pairs == 0) throw std::invalid_argument("n_pairs must be positive");
  const double n = static_cast<double>(n_pairs);

  std::map<DetectionOutcome, RateEstimate> estimates;
  for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
    double correction = 1.0;
    if (correct_for.has_value()) {
      correction = correct_for->efficiency_of(left_detector(ch)) *
                   correct_for->efficiency_of(right_detector(ch));
      if (!(correction > 0.0)) {
        throw std::invalid_argument(
            "cannot efficiency-correct a channel with zero detector efficiency");
      }
    }
    for (int m = -hist.max_offset; m <= hist.max_offset; ++m) {
      const std::uint64_t c = hist.count(ch, m);
      RateEstimate est;
      if (c == 0) {
        // Rule of three: one-sided 95% upper bound for an unseen outcome.
        est.rate = 0.0;
        est.std_error = 3.0 / n;
      } else {
        const double p = static_cast<double>(c) / n;
        est.rate = p;
        est.std_error = std::sqrt(p * (1.0 - p) / n);
      }
      est.rate /= correction;
      est.std_error /= correction;
      estimates[DetectionOutcome{ch, m}] = est;
    }
  }
  return estimates;
}

double fringe_visibility(std::span<const std::pair<double, double>> rates_vs_theta) {
  if (rates_vs_theta.size() < 3) {
    throw std::invalid_argument("visibility needs at least 3 scan points");
  }
  double theta_min = rates_vs_theta.front().first;
  double theta_max = theta_min;
  double rate_min = rates_vs_theta.front().second;
  double rate_max = rate_min;
  for (const auto& [theta, rate] : rates_vs_theta) {
    theta_min = std::min(theta_min, theta);
    theta_max = std::max(theta_max, theta);
    rate_min = std::min(rate_min, rate);
    rate_max = std::max(rate_max, rate);
  }
  const double span = theta_max - theta_min;
  const double mean_step = span / static_cast<double>(rates_vs_theta.size() - 1);
  if (!(span + mean_step >= two_pi - 1e-9)) {
    throw std::invalid_argument("scan must span at least one full period");
  }
  if (rate_max <= 0.0) {
    throw std::domain_error("visibility undefined: every rate is zero");
  }
  return (rate_max - rate_min) / (rate_max + rate_min);
}

void save_clicks_csv(std::span<const ClickEvent> stream, std::ostream& out) {
  out << "detector,timestamp_seconds\n";
  char buf[64];
  for (const ClickEvent& c : stream) {
    std::snprintf(buf, sizeof buf, "%s,%.17g\n", to_string(c.detector), c.timestamp);
    out << buf;
  }
}

std::vector<ClickEvent> load_clicks_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<ClickEvent> stream;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "detector,timestamp_seconds") {
        throw std::runtime_error("click CSV header must be 'detector,timestamp_seconds'");
      }
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("click CSV row needs 2 fields: " + line);
    }
    const auto detector = detector_from_string(line.substr(0, comma));
    if (!detector.has_value()) {
      throw std::runtime_error("unknown detector id: " + line.substr(0, comma));
    }
    stream.push_back({*detector, std::stod(line.substr(comma + 1))});
  }
  if (!header_seen) throw std::runtime_error("click CSV has no header");
  return stream;
}

void save_clicks_ndjson(std::span<const ClickEvent> stream, std::ostream& out) {
  char buf[96];
  for (const ClickEvent& c : stream) {
    std::snprintf(buf, sizeof buf, "{\"detector\":\"%s\",\"timestamp_seconds\":%.17g}\n",
                  to_string(c.detector), c.timestamp);
    out << buf;
  }
}

void save_histogram_csv(const CoincidenceHistogram& hist, std::ostream& out) {
  out << "pair,m,count\n";
  for (const auto& [key, count] : hist.bins) {
    out << to_string(key.first) << ',' << key.second << ',' << count << '\n';
  }
}

} // namespace dcfp

#pragma once

#include "dcfp/biphoton.hpp"
#include "dcfp/channels.hpp"
#include "dcfp/mirror.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dcfp {

/// The four single-photon counting modules.
enum class DetectorId { L1, L2, R1, R2 };

const char* to_string(DetectorId id);
std::optional<DetectorId> detector_from_string(const std::string& name);

inline bool is_left_arm(DetectorId id) {
  return id == DetectorId::L1 || id == DetectorId::L2;
}

/// Detector imperfections. Defaults are the ideal ones; knobs exist for the
/// degradation study.
struct DetectorModel {
  std::array<double, 4> efficiency{1.0, 1.0, 1.0, 1.0}; // indexed by DetectorId
  double timing_jitter_sigma = 0.0; // seconds, Gaussian per click
  double dark_count_rate = 0.0;     // events/second per detector

  double efficiency_of(DetectorId id) const {
    return efficiency[static_cast<std::size_t>(id)];
  }
  void validate() const;
};

struct ClickEvent {
  DetectorId detector = DetectorId::L1;
  double timestamp = 0.0; // seconds

  friend auto operator<=>(const ClickEvent&, const ClickEvent&) = default;
};

struct CoincidenceHistogram {
  double bin_width = 0.0; // matching window, seconds
  std::map<std::pair<Channel, int>, std::uint64_t> bins;
  std::uint64_t total_pairs_emitted = 0;
  int max_offset = 0; // |m| range the builder searched
  std::uint64_t unmatched_left = 0;
  std::uint64_t unmatched_right = 0;

  std::uint64_t count(Channel channel, int offset_m) const;
  std::uint64_t total_counts() const;
};

// I.i.d. samples from the channel distribution (truncated at a 1e-9 tail and
// renormalized). One counter-based substream per pair: the sequence is
// deterministic in (mirrors, theta, seed) and independent of evaluation
// order.
std::vector<DetectionOutcome> sample_pair_outcomes(const MirrorCoefficients& mirrors,
                                                   double theta,
                                                   std::uint64_t n_pairs,
                                                   std::uint64_t seed);

// Click streams for a sequence of outcomes. Pair j is emitted at
// j * pair_interval; the two clicks land on the detectors named by the
// channel, the left-arm click leading by offset_m round trips (positive m)
// or trailing (negative m). Each click survives with its detector's
// efficiency and is jittered by the Gaussian sigma; dark counts are appended
// as a Poisson process per detector over the full span. Sorted by timestamp.
// pair_interval must exceed (max |m| + 2) round trips.
std::vector<ClickEvent> emit_click_streams(std::span<const DetectionOutcome> outcomes,
                                           double round_trip_time,
                                           double pair_interval,
                                           const DetectorModel& detectors,
                                           std::uint64_t seed);

// Greedy nearest-offset pairing of left-arm against right-arm clicks:
// a pair (t_L, t_R) lands in bin m = round((t_R - t_L)/round_trip_time) when
// the residual is within matching_window and |m| <= max_offset. Each click
// is used at most once; leftovers are tallied as unmatched.
// matching_window must stay below round_trip_time / 2.
CoincidenceHistogram build_histogram(std::span<const ClickEvent> stream,
                                     double round_trip_time,
                                     double matching_window,
                                     int max_offset,
                                     std::uint64_t total_pairs_emitted);

struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0; // binomial; rule-of-three upper bound when count=0
};

// Per-channel rate estimates count / n_pairs. When `correct_for` is given,
// each estimate is divided by the product of the two involved detectors'
// efficiencies.
std::map<DetectionOutcome, RateEstimate> estimate_rates(
    const CoincidenceHistogram& hist, std::uint64_t n_pairs,
    const std::optional<DetectorModel>& correct_for = std::nullopt);

// (max - min) / (max + min) of a rate over a phase scan covering at least
// one period. Throws if every rate is zero.
double fringe_visibility(std::span<const std::pair<double, double>> rates_vs_theta);

// Click stream serialization: CSV (detector,timestamp_seconds) and
// newline-delimited JSON records, both in stream order.
void save_clicks_csv(std::span<const ClickEvent> stream, std::ostream& out);
std::vector<ClickEvent> load_clicks_csv(std::istream& in);
void save_clicks_ndjson(std::span<const ClickEvent> stream, std::ostream& out);

// Histogram CSV: columns pair,m,count.
void save_histogram_csv(const CoincidenceHistogram& hist, std::ostream& out);

} // namespace dcfp

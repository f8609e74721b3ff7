#include "dcfp/cli/commands.hpp"

#include "dcfp/biphoton.hpp"
#include "dcfp/clicksim.hpp"
#include "dcfp/constants.hpp"
#include "dcfp/envelope.hpp"
#include "dcfp/mirror.hpp"
#include "dcfp/path_oracle.hpp"
#include "dcfp/phase.hpp"
#include "dcfp/spectral.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace dcfp::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ConfigFile load_config(const GlobalOptions& options) {
  if (options.config_path.empty()) return ConfigFile{};
  return ConfigFile::parse_file(options.config_path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

std::string output_path(const GlobalOptions& options, const std::string& fallback) {
  return options.out_path.empty() ? fallback : options.out_path;
}

// "# dcfp <version> <command> seed=<seed>" plus the effective config line.
void write_csv_preamble(std::ostream& out, const std::string& command,
                        const GlobalOptions& options, const SectionReader& reader) {
  out << "# dcfp " << tool_version << ' ' << command << " seed=" << options.seed << '\n';
  out << "# config: " << reader.effective_config() << '\n';
}

MirrorCoefficients mirrors_from(SectionReader& reader, const std::string& key,
                                double fallback) {
  const double t = reader.get_double(key, fallback);
  try {
    return MirrorCoefficients::from_transmission(t);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

Channel channel_from(const std::string& name, const std::string& key) {
  if (name == "TT") return Channel::TT;
  if (name == "RR") return Channel::RR;
  if (name == "RT") return Channel::RT;
  if (name == "TR") return Channel::TR;
  throw ConfigError("key '" + key + "': unknown channel '" + name +
                    "' (expected TT, RR, RT or TR)");
}

// Reference length snapped to the nearest joint resonance, so scan offsets
// count from a rate maximum.
double snap_to_resonance(double ref_length, double sum_frequency) {
  const double half_wavelength = pi * speed_of_light / sum_frequency;
  const double n = std::max(1.0, std::nearbyint(ref_length / half_wavelength));
  return n * half_wavelength;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t used =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  if (used <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (std::size_t k = 0; k < used; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void print_summary(std::ostream& log, const GlobalOptions& options, const json& summary,
                   const std::string& plain) {
  if (options.format == "json") {
    log << summary.dump() << '\n';
  } else {
    log << plain << '\n';
  }
}

// Smallest l_max whose truncation tail stays below `target` for every
// channel, by doubling; capped (the caller's comparisons then fail honestly).
int adaptive_oracle_l_max(const MirrorCoefficients& mirrors, double target, int cap) {
  int l = 16;
  const DetectionOutcome probes[] = {{Channel::TT, 0}, {Channel::RR, 0},
                                     {Channel::RT, 0}, {Channel::TR, 0}};
  for (;;) {
    double worst = 0.0;
    for (const auto& probe : probes) {
      worst = std::max(worst, bruteforce_tail_bound(mirrors, probe, l));
    }
    if (worst < target || l >= cap) return std::min(l, cap);
    l *= 2;
  }
}

} // namespace

int cmd_scan2d(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "scan2d");
  const MirrorCoefficients mirrors = mirrors_from(reader, "t_field", 0.5);
  const Channel channel = channel_from(reader.get_string("channel", "TT"), "channel");
  const int offset_m = reader.get_int("offset_m", 0);
  const double ref_length = reader.get_double("ref_length_m", 0.005);
  const double sum_frequency = reader.get_double("sum_frequency", 4.8e15);
  const int periods = reader.get_int("periods", 2);
  const int steps = reader.get_int("steps", 101);
  reader.finish();
  if (!(ref_length > 0.0)) throw ConfigError("key 'ref_length_m' must be positive");
  if (!(sum_frequency > 0.0)) throw ConfigError("key 'sum_frequency' must be positive");
  if (periods < 1) throw ConfigError("key 'periods' must be at least 1");
  if (steps < 2) throw ConfigError("key 'steps' must be at least 2");

  const double half_wavelength = pi * speed_of_light / sum_frequency;
  const double d_ref = snap_to_resonance(ref_length, sum_frequency);
  const double span = 2.0 * periods; // theta advances 2*pi per 2 offset units
  const std::size_t n = static_cast<std::size_t>(steps);

  std::vector<std::string> rows(n * n);
  parallel_for(n, options.threads, [&](std::size_t il) {
    const double u_left = span * static_cast<double>(il) / static_cast<double>(n - 1);
    const double d_left = d_ref + u_left * half_wavelength;
    char buf[176];
    for (std::size_t ir = 0; ir < n; ++ir) {
      const double u_right = span * static_cast<double>(ir) / static_cast<double>(n - 1);
      const double d_right = d_ref + u_right * half_wavelength;
      const double theta = phase_from_geometry(0.5 * sum_frequency, 0.5 * sum_frequency,
                                               d_left, d_right);
      const double rate =
          channel_amplitude(mirrors, theta, {channel, offset_m}).rate();
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", u_left, u_right,
                    theta, rate);
      rows[il * n + ir] = buf;
    }
  });

  const std::string path = output_path(options, "scan2d.csv");
  std::ofstream out = open_output(path);
  write_csv_preamble(out, "scan2d", options, reader);
  out << "# offsets in units of pi*c/sum_frequency around d_ref=" << fmt(d_ref) << '\n';
  out << "dL_offset,dR_offset,theta_rad,rate\n";
  for (const std::string& row : rows) out << row;

  print_summary(log, options,
                json{{"command", "scan2d"},
                     {"points", n * n},
                     {"out", path}},
                "scan2d: wrote " + std::to_string(n * n) + " points to " + path);
  return kExitOk;
}

int cmd_scan_single(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "scan-single");
  const std::vector<double> t_fields =
      reader.get_double_list("t_fields", {0.5, 0.2});
  const double ref_length = reader.get_double("ref_length_m", 0.005);
  const double sum_frequency = reader.get_double("sum_frequency", 4.8e15);
  const int periods = reader.get_int("periods", 2);
  const int steps = reader.get_int("steps", 401);
  reader.finish();
  if (!(ref_length > 0.0)) throw ConfigError("key 'ref_length_m' must be positive");
  if (!(sum_frequency > 0.0)) throw ConfigError("key 'sum_frequency' must be positive");
  if (periods < 1) throw ConfigError("key 'periods' must be at least 1");
  if (steps < 2) throw ConfigError("key 'steps' must be at least 2");

  const double half_wavelength = pi * speed_of_light / sum_frequency;
  const double d_ref = snap_to_resonance(ref_length, sum_frequency);
  const std::size_t n = static_cast<std::size_t>(steps);

  const std::string base = output_path(options, "scan_single.csv");
  std::vector<std::string> paths;
  for (double t_field : t_fields) {
    MirrorCoefficients mirrors = [&] {
      try {
        return MirrorCoefficients::from_transmission(t_field);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("key 't_fields': ") + e.what());
      }
    }();

    std::vector<std::string> rows(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
      // One period in theta per offset unit: a single cavity carries both
      // photons, so d -> d + pi*c/sum_frequency advances theta by 2*pi.
      const double u = static_cast<double>(periods) * static_cast<double>(i) /
                       static_cast<double>(n - 1);
      const double d = d_ref + u * half_wavelength;
      const double theta =
          phase_from_geometry(0.5 * sum_frequency, 0.5 * sum_frequency, d, d);
      const double rate = transmission_coincidence_rate(mirrors, theta);
      char buf[136];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", d, theta, rate);
      rows[i] = buf;
    });

    std::string path = base;
    if (t_fields.size() > 1) {
      const std::size_t dot = base.rfind('.');
      const std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
      const std::string ext = dot == std::string::npos ? "" : base.substr(dot);
      char label[40];
      std::snprintf(label, sizeof label, "%g", t_field);
      path = stem + "_T" + label + ext;
    }
    std::ofstream out = open_output(path);
    write_csv_preamble(out, "scan-single", options, reader);
    out << "# t_field=" << fmt(t_field) << " d_ref=" << fmt(d_ref) << '\n';
    out << "d_meters,theta_rad,rate\n";
    for (const std::string& row : rows) out << row;
    paths.push_back(path);
  }

  json files = json::array();
  for (const auto& p : paths) files.push_back(p);
  print_summary(log, options,
                json{{"command", "scan-single"}, {"series", t_fields.size()},
                     {"files", files}},
                "scan-single: wrote " + std::to_string(paths.size()) + " series");
  return kExitOk;
}

namespace {

// Shared by spectral-scan and the acceptance suite: flat window of
// window_trips round trips, sampled samples_per_trip per trip, carrying the
// requested modulation components (offset in FSR units, amplitude).
EnvelopeFunction build_component_envelope(double round_trip_time,
                                          int samples_per_trip, int window_trips,
                                          const std::vector<std::pair<double, double>>& components) {
  const double tau_step = round_trip_time / samples_per_trip;
  const std::size_t n = static_cast<std::size_t>(window_trips) *
                        static_cast<std::size_t>(samples_per_trip);
  const double fsr = two_pi / round_trip_time;
  EnvelopeFunction window = make_window_envelope(0.0, tau_step, n, 0, n);
  if (components.empty()) return window;
  std::vector<std::complex<double>> samples(n, {0.0, 0.0});
  EnvelopeFunction sum(0.0, tau_step, std::move(samples));
  for (const auto& [offset_fsr, amplitude] : components) {
    EnvelopeFunction mode = with_modulation(window, offset_fsr * fsr);
    for (auto& s : mode.samples()) s *= amplitude;
    sum = add_envelopes(sum, mode);
  }
  return sum;
}

std::vector<std::pair<double, double>> parse_components(const std::string& text) {
  std::vector<std::pair<double, double>> components;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::size_t colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        components.emplace_back(std::stod(item), 1.0);
      } else {
        components.emplace_back(std::stod(item.substr(0, colon)),
                                std::stod(item.substr(colon + 1)));
      }
    } catch (const std::exception&) {
      throw ConfigError("key 'components': malformed item '" + item +
                        "' (expected offset_fsr[:amplitude])");
    }
  }
  if (components.empty()) throw ConfigError("key 'components' is an empty list");
  return components;
}

} // namespace

int cmd_spectral_scan(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "spectral-scan");
  const MirrorCoefficients mirrors = mirrors_from(reader, "t_field", 0.2);
  const double ref_length = reader.get_double("ref_length_m", 0.005);
  const double sum_frequency = reader.get_double("sum_frequency", 4.8e15);
  const int periods = reader.get_int("periods", 1);
  const int steps = reader.get_int("steps", 420);
  int l_max = reader.get_int("l_max", 0);
  const std::string envelope_file = reader.get_string("envelope_file", "");
  const int samples_per_trip = reader.get_int("samples_per_trip", 16);
  const int window_trips = reader.get_int("window_trips", 600);
  const std::string components_text = reader.get_string("components", "0");
  reader.finish();
  if (!(ref_length > 0.0)) throw ConfigError("key 'ref_length_m' must be positive");
  if (!(sum_frequency > 0.0)) throw ConfigError("key 'sum_frequency' must be positive");
  if (periods < 1) throw ConfigError("key 'periods' must be at least 1");
  if (steps < 3) throw ConfigError("key 'steps' must be at least 3");
  if (samples_per_trip < 2) throw ConfigError("key 'samples_per_trip' must be at least 2");
  if (window_trips < 2) throw ConfigError("key 'window_trips' must be at least 2");

  const double half_wavelength = pi * speed_of_light / sum_frequency;
  const double d_ref = snap_to_resonance(ref_length, sum_frequency);
  const double round_trip_time = 2.0 * d_ref / speed_of_light;

  EnvelopeFunction envelope = [&] {
    if (!envelope_file.empty()) return load_envelope_csv_file(envelope_file).normalized();
    return build_component_envelope(round_trip_time, samples_per_trip, window_trips,
                                    parse_components(components_text))
        .normalized();
  }();

  if (l_max <= 0) {
    const double r4 = std::pow(mirrors.r_field(), 4);
    l_max = r4 <= 0.0 ? 1
                      : std::min(5000, std::max(8, static_cast<int>(std::ceil(
                                                      std::log(1e-8) / std::log(r4)))));
  }

  std::vector<double> d_values(static_cast<std::size_t>(steps));
  for (std::size_t i = 0; i < d_values.size(); ++i) {
    const double u = static_cast<double>(periods) * static_cast<double>(i) /
                     static_cast<double>(steps);
    d_values[i] = d_ref + u * half_wavelength;
  }

  // cavity_scan itself is serial; parallelize across points and reassemble.
  ScanResult scan;
  scan.meta.t_field = mirrors.t_field();
  scan.meta.l_max = l_max;
  scan.meta.sum_frequency = sum_frequency;
  scan.meta.envelope_id = envelope_file.empty() ? ("components:" + components_text)
                                                : envelope_file;
  scan.d_values = d_values;
  scan.theta_values.assign(d_values.size(), 0.0);
  scan.rates.assign(d_values.size(), 0.0);
  scan.meta.round_trip_time =
      nearest_commensurate_round_trip(round_trip_time, envelope.tau_step());
  parallel_for(d_values.size(), options.threads, [&](std::size_t i) {
    const ScanResult point = cavity_scan(envelope, mirrors, {d_values[i]},
                                         sum_frequency, l_max);
    scan.theta_values[i] = point.theta_values[0];
    scan.rates[i] = point.rates[0];
  });

  const std::string path = output_path(options, "spectral_scan.csv");
  std::ofstream out = open_output(path);
  write_csv_preamble(out, "spectral-scan", options, reader);
  out << "# d_ref=" << fmt(d_ref) << " round_trip_time=" << fmt(scan.meta.round_trip_time)
      << " l_max=" << l_max << '\n';
  save_scan_csv(scan, out);

  print_summary(log, options,
                json{{"command", "spectral-scan"}, {"points", scan.size()},
                     {"l_max", l_max}, {"out", path}},
                "spectral-scan: wrote " + std::to_string(scan.size()) + " points to " + path);
  return kExitOk;
}

int cmd_spectral_readout(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "spectral-readout");
  const std::string scan_file = reader.require_string("scan_file");
  const MirrorCoefficients mirrors = mirrors_from(reader, "t_field", 0.2);
  double fsr = reader.get_double("free_spectral_range", 0.0);
  const double threshold = reader.get_double("threshold", 0.1);
  reader.finish();
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("key 'threshold' must lie in (0, 1)");
  }

  const ScanResult scan = load_scan_csv_file(scan_file);
  if (fsr <= 0.0) {
    if (scan.d_values.empty()) {
      throw ConfigError("key 'free_spectral_range' required for a scan without lengths");
    }
    fsr = pi * speed_of_light / scan.d_values.front();
  }

  const SpectralReadout readout = spectral_readout(scan, mirrors, fsr, threshold);

  json lines = json::array();
  for (const SpectralLine& line : readout.lines) {
    lines.push_back(json{{"offset_rad_per_s", line.frequency_offset},
                         {"offset_fsr", line.frequency_offset / fsr},
                         {"weight", line.weight}});
  }
  const json report{{"tool", std::string("dcfp ") + tool_version},
                    {"command", "spectral-readout"},
                    {"seed", options.seed},
                    {"config", reader.effective_config()},
                    {"free_spectral_range", fsr},
                    {"resolved", readout.resolved},
                    {"note", readout.note},
                    {"lines", lines}};
  const std::string path = output_path(options, "spectral_readout.json");
  std::ofstream out = open_output(path);
  out << report.dump(2) << '\n';

  print_summary(log, options, report,
                "spectral-readout: " + std::to_string(readout.lines.size()) +
                    " line(s), " + (readout.resolved ? "resolved" : "UNRESOLVED") +
                    ", wrote " + path);
  return readout.resolved ? kExitOk : kExitVerificationFailure;
}

int cmd_oracle_check(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "oracle-check");
  const std::vector<double> t_fields =
      reader.get_double_list("t_fields", {0.2, 0.5, 0.8});
  const int theta_points = reader.get_int("theta_points", 8);
  const int max_offset = reader.get_int("max_offset", 5);
  const int l_max_config = reader.get_int("l_max", 0);
  const double tolerance = reader.get_double("tolerance", 1e-10);
  reader.finish();
  if (theta_points < 1) throw ConfigError("key 'theta_points' must be at least 1");
  if (max_offset < 0) throw ConfigError("key 'max_offset' must be non-negative");
  if (!(tolerance > 0.0)) throw ConfigError("key 'tolerance' must be positive");

  std::vector<DetectionOutcome> outcomes;
  for (Channel ch : {Channel::TT, Channel::RR, Channel::RT, Channel::TR}) {
    for (int m = -max_offset; m <= max_offset; ++m) outcomes.push_back({ch, m});
  }

  struct Aggregate {
    double max_deviation = 0.0;
    double max_tail_bound = 0.0;
    bool pass = true;
  };
  std::map<DetectionOutcome, Aggregate> per_outcome;
  bool all_pass = true;
  std::size_t checks = 0;

  for (double t_field : t_fields) {
    const MirrorCoefficients mirrors = [&] {
      try {
        return MirrorCoefficients::from_transmission(t_field);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("key 't_fields': ") + e.what());
      }
    }();
    const int l_max = l_max_config > 0
                          ? l_max_config
                          : adaptive_oracle_l_max(mirrors, 0.5 * tolerance, 200000);
    for (int j = 0; j < theta_points; ++j) {
      const double theta = two_pi * static_cast<double>(j) /
                           static_cast<double>(theta_points);
      const ComparisonReport report =
          compare_with_closed_form(mirrors, theta, outcomes, l_max, tolerance);
      checks += report.entries.size();
      for (const ComparisonEntry& entry : report.entries) {
        Aggregate& agg = per_outcome[entry.outcome];
        agg.max_deviation = std::max(agg.max_deviation, entry.deviation);
        agg.max_tail_bound = std::max(agg.max_tail_bound, entry.tail_bound);
        agg.pass = agg.pass && entry.pass;
        all_pass = all_pass && entry.pass;
      }
    }
  }

  json outcome_rows = json::array();
  for (const auto& [outcome, agg] : per_outcome) {
    outcome_rows.push_back(json{{"outcome", to_string(outcome)},
                                {"max_deviation", agg.max_deviation},
                                {"max_tail_bound", agg.max_tail_bound},
                                {"pass", agg.pass}});
  }
  const json report{{"tool", std::string("dcfp ") + tool_version},
                    {"command", "oracle-check"},
                    {"seed", options.seed},
                    {"config", reader.effective_config()},
                    {"checks", checks},
                    {"tolerance", tolerance},
                    {"all_pass", all_pass},
                    {"outcomes", outcome_rows}};
  const std::string path = output_path(options, "oracle_check.json");
  std::ofstream out = open_output(path);
  out << report.dump(2) << '\n';

  print_summary(log, options, report,
                std::string("oracle-check: ") + (all_pass ? "PASS" : "FAIL") + " (" +
                    std::to_string(checks) + " checks), wrote " + path);
  return all_pass ? kExitOk : kExitVerificationFailure;
}

int cmd_simulate(const GlobalOptions& options, std::ostream& log) {
  const ConfigFile config = load_config(options);
  SectionReader reader(config, "simulate");
  const MirrorCoefficients mirrors = mirrors_from(reader, "t_field", 0.5);
  const double theta = reader.get_double("theta", 0.0);
  const std::uint64_t n_pairs = reader.get_u64("n_pairs", 100000);
  const double round_trip_time = reader.get_double("round_trip_time", 1e-9);
  const int max_offset = reader.get_int("max_offset", 8);
  const int pair_interval_trips = reader.get_int("pair_interval_trips", 0);
  const double window_fraction = reader.get_double("matching_window_fraction", 0.25);
  DetectorModel detectors;
  const double efficiency = reader.get_double("efficiency", 1.0);
  detectors.efficiency = {efficiency, efficiency, efficiency, efficiency};
  detectors.efficiency[0] = reader.get_double("efficiency_l1", efficiency);
  detectors.efficiency[1] = reader.get_double("efficiency_l2", efficiency);
  detectors.efficiency[2] = reader.get_double("efficiency_r1", efficiency);
  detectors.efficiency[3] = reader.get_double("efficiency_r2", efficiency);
  detectors.timing_jitter_sigma = reader.get_double("jitter_sigma", 0.0);
  detectors.dark_count_rate = reader.get_double("dark_rate", 0.0);
  bool corrected = reader.get_bool(
      "corrected", detectors.efficiency != std::array<double, 4>{1.0, 1.0, 1.0, 1.0});
  reader.finish();
  if (n_pairs == 0) throw ConfigError("key 'n_pairs' must be at least 1");
  if (!(round_trip_time > 0.0)) throw ConfigError("key 'round_trip_time' must be positive");
  if (max_offset < 0) throw ConfigError("key 'max_offset' must be non-negative");
  if (!(window_fraction > 0.0 && window_fraction < 0.5)) {
    throw ConfigError("key 'matching_window_fraction' must lie in (0, 0.5)");
  }
  try {
    detectors.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("detector model: ") + e.what());
  }

  const std::vector<DetectionOutcome> outcomes =
      sample_pair_outcomes(mirrors, theta, n_pairs, options.seed);
  int max_sampled_m = 0;
  for (const DetectionOutcome& o : outcomes) {
    max_sampled_m = std::max(max_sampled_m, std::abs(o.offset_m));
  }
  const int trips = pair_interval_trips > 0
                        ? pair_interval_trips
                        : std::max(max_sampled_m, max_offset) + 3;
  const double pair_interval = trips * round_trip_time;
  const std::vector<ClickEvent> stream =
      emit_click_streams(outcomes, round_trip_time, pair_interval, detectors, options.seed);
  const CoincidenceHistogram hist = build_histogram(
      stream, round_trip_time, window_fraction * round_trip_time, max_offset, n_pairs);
  const auto estimates = estimate_rates(
      hist, n_pairs, corrected ? std::optional<DetectorModel>(detectors) : std::nullopt);

  // z-scores against the analytic channel probabilities, sigma taken from the
  // expected observed (efficiency-thinned) count.
  const double n = static_cast<double>(n_pairs);
  double max_abs_z = 0.0;
  json channels = json::array();
  for (const auto& [outcome, estimate] : estimates) {
    const double analytic = channel_amplitude(mirrors, theta, outcome).rate();
    const double eta =
        detectors.efficiency_of(outcome.channel == Channel::TT || outcome.channel == Channel::TR
                                    ? DetectorId::L1
                                    : DetectorId::L2) *
        detectors.efficiency_of(outcome.channel == Channel::TT || outcome.channel == Channel::RT
                                    ? DetectorId::R1
                                    : DetectorId::R2);
    const double q = analytic * eta; // expected observed probability
    double sigma = std::sqrt(std::max(0.0, q * (1.0 - q)) / n);
    if (corrected && eta > 0.0) sigma /= eta;
    const double reference = corrected ? analytic : q;
    double z;
    if (sigma > 0.0) {
      z = (estimate.rate - reference) / sigma;
    } else {
      z = estimate.rate == reference ? 0.0 : std::numeric_limits<double>::infinity();
    }
    max_abs_z = std::max(max_abs_z, std::abs(z));
    channels.push_back(json{{"outcome", to_string(outcome)},
                            {"analytic", analytic},
                            {"estimate", estimate.rate},
                            {"std_error", estimate.std_error},
                            {"z", z}});
  }
  const bool pass = max_abs_z <= 5.0;

  const std::string json_path = output_path(options, "simulate.json");
  const std::string clicks_path = [&] {
    const std::size_t dot = json_path.rfind('.');
    const std::string stem =
        dot == std::string::npos ? json_path : json_path.substr(0, dot);
    return stem + ".clicks.csv";
  }();

  {
    std::ofstream out = open_output(clicks_path);
    write_csv_preamble(out, "simulate", options, reader);
    save_clicks_csv(stream, out);
  }

  const json report{{"tool", std::string("dcfp ") + tool_version},
                    {"command", "simulate"},
                    {"seed", options.seed},
                    {"config", reader.effective_config()},
                    {"n_pairs", n_pairs},
                    {"theta", theta},
                    {"corrected", corrected},
                    {"clicks_csv", clicks_path},
                    {"total_clicks", stream.size()},
                    {"unmatched_left", hist.unmatched_left},
                    {"unmatched_right", hist.unmatched_right},
                    {"max_abs_z", max_abs_z},
                    {"pass", pass},
                    {"channels", channels}};
  std::ofstream out = open_output(json_path);
  out << report.dump(2) << '\n';

  print_summary(log, options, report,
                std::string("simulate: ") + (pass ? "PASS" : "FAIL") +
                    " max|z|=" + fmt(max_abs_z) + ", wrote " + json_path + " and " +
                    clicks_path);
  return pass ? kExitOk : kExitVerificationFailure;
}

int run_command(const std::string& name, const GlobalOptions& options, std::ostream& log) {
  if (name == "scan2d") return cmd_scan2d(options, log);
  if (name == "scan-single") return cmd_scan_single(options, log);
  if (name == "spectral-scan") return cmd_spectral_scan(options, log);
  if (name == "spectral-readout") return cmd_spectral_readout(options, log);
  if (name == "oracle-check") return cmd_oracle_check(options, log);
  if (name == "simulate") return cmd_simulate(options, log);
  throw ConfigError("unknown command: " + name);
}

} // namespace dcfp::cli

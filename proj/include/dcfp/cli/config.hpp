#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcfp::cli {

/// Raised for malformed config files, unknown keys, or out-of-range values;
/// the message names the offending key. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// INI-style structured text: [section] headers, key = value lines,
/// '#' comments, blank lines ignored.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse(std::istream& in);
  static ConfigFile parse_file(const std::string& path);

  bool has_section(const std::string& name) const {
    return sections.count(name) != 0;
  }
};

/// Typed access to one section. Every key must be consumed: finish() throws
/// on leftovers, so misspelled keys fail fast instead of silently using
/// defaults.
class SectionReader {
public:
  SectionReader(const ConfigFile& config, std::string section);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback);

  /// The key=value view of everything consumed (with defaults applied),
  /// sorted by key; embedded in output metadata for reproducibility.
  std::string effective_config() const;

  void finish() const;

private:
  std::string raw(const std::string& key);

  std::string section_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> effective_;
};

} // namespace dcfp::cli

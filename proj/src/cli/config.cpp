#include "dcfp/cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcfp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile config;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      }
      config.sections[section]; // section may legitimately stay empty
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got '" + text + "'");
    }
    if (section.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any [section]");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!config.sections[section].emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                        key + "' in [" + section + "]");
    }
  }
  return config;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

SectionReader::SectionReader(const ConfigFile& config, std::string section)
    : section_(std::move(section)) {
  const auto it = config.sections.find(section_);
  if (it != config.sections.end()) values_ = it->second;
}

bool SectionReader::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string SectionReader::raw(const std::string& key) {
  consumed_.insert(key);
  return values_.at(key);
}

std::string SectionReader::get_string(const std::string& key, const std::string& fallback) {
  const std::string v = has(key) ? raw(key) : fallback;
  effective_[key] = v;
  return v;
}

std::string SectionReader::require_string(const std::string& key) {
  if (!has(key)) {
    throw ConfigError("[" + section_ + "] is missing required key '" + key + "'");
  }
  const std::string v = raw(key);
  effective_[key] = v;
  return v;
}

double SectionReader::get_double(const std::string& key, double fallback) {
  double v = fallback;
  if (has(key)) {
    const std::string s = raw(key);
    try {
      std::size_t pos = 0;
      v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("[" + section_ + "] key '" + key + "' is not a number: " + s);
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  effective_[key] = buf;
  return v;
}

int SectionReader::get_int(const std::string& key, int fallback) {
  int v = fallback;
  if (has(key)) {
    const std::string s = raw(key);
    try {
      std::size_t pos = 0;
      v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("[" + section_ + "] key '" + key + "' is not an integer: " + s);
    }
  }
  effective_[key] = std::to_string(v);
  return v;
}

std::uint64_t SectionReader::get_u64(const std::string& key, std::uint64_t fallback) {
  std::uint64_t v = fallback;
  if (has(key)) {
    const std::string s = raw(key);
    try {
      std::size_t pos = 0;
      v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("[" + section_ + "] key '" + key + "' is not an unsigned integer: " + s);
    }
  }
  effective_[key] = std::to_string(v);
  return v;
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
  bool v = fallback;
  if (has(key)) {
    const std::string s = raw(key);
    if (s == "true" || s == "1" || s == "yes") {
      v = true;
    } else if (s == "false" || s == "0" || s == "no") {
      v = false;
    } else {
      throw ConfigError("[" + section_ + "] key '" + key + "' is not a boolean: " + s);
    }
  }
  effective_[key] = v ? "true" : "false";
  return v;
}

std::vector<double> SectionReader::get_double_list(const std::string& key,
                                                   const std::vector<double>& fallback) {
  std::vector<double> v = fallback;
  if (has(key)) {
    v.clear();
    const std::string s = raw(key);
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t pos = 0;
        v.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("[" + section_ + "] key '" + key +
                          "' has a non-numeric list item: " + item);
      }
    }
    if (v.empty()) {
      throw ConfigError("[" + section_ + "] key '" + key + "' is an empty list");
    }
  }
  std::string joined;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) joined += ',';
    joined += buf;
  }
  effective_[key] = joined;
  return v;
}

std::string SectionReader::effective_config() const {
  std::string out;
  for (const auto& [key, value] : effective_) {
    if (!out.empty()) out += ' ';
    out += key + "=" + value;
  }
  return out;
}

void SectionReader::finish() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "[" + section_ + "] has unknown key(s):";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }
}

} // namespace dcfp::cli

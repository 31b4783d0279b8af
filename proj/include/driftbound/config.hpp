#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "driftbound/core.hpp"

namespace driftbound {

// Flat key-value config with [section] headers. '#' and ';' start comments.
// Keys before the first header land in the "" section.
class KeyValueConfig {
 public:
  using Section = std::map<std::string, std::string>;

  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }
  const Section& section(const std::string& name) const;
  Section& section(const std::string& name) { return sections_[name]; }
  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  std::map<std::string, Section> sections_;
};

std::string trim(const std::string& s);
double parse_double(const std::string& s, const std::string& key);
std::int64_t parse_int(const std::string& s, const std::string& key);
std::uint64_t parse_u64(const std::string& s, const std::string& key);
std::vector<double> parse_double_list(const std::string& s, const std::string& key);
std::vector<std::int64_t> parse_int_list(const std::string& s, const std::string& key);

// Typed lookups with defaults; malformed values throw ConfigError.
double get_double(const KeyValueConfig::Section& s, const std::string& key, double fallback);
std::int64_t get_int(const KeyValueConfig::Section& s, const std::string& key, std::int64_t fallback);
std::vector<double> get_double_list(const KeyValueConfig::Section& s, const std::string& key,
                                    std::vector<double> fallback);
std::vector<std::int64_t> get_int_list(const KeyValueConfig::Section& s, const std::string& key,
                                       std::vector<std::int64_t> fallback);

}  // namespace driftbound

#include "driftbound/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace driftbound {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      cfg.sections_[current];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.sections_[current][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const KeyValueConfig::Section& KeyValueConfig::section(const std::string& name) const {
  static const Section empty;
  auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

double parse_double(const std::string& s, const std::string& key) {
  std::string t = trim(s);
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': cannot parse '" + s + "' as a number");
  }
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
  std::string t = trim(s);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ConfigError("'" + key + "': cannot parse '" + s + "' as an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  std::string t = trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ConfigError("'" + key + "': cannot parse '" + s + "' as an unsigned integer");
  return v;
}

namespace {
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}
}  // namespace

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& c : split_list(s)) out.push_back(parse_double(c, key));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<std::int64_t> out;
  for (const auto& c : split_list(s)) out.push_back(parse_int(c, key));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

double get_double(const KeyValueConfig::Section& s, const std::string& key, double fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_double(it->second, key);
}

std::int64_t get_int(const KeyValueConfig::Section& s, const std::string& key, std::int64_t fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_int(it->second, key);
}

std::vector<double> get_double_list(const KeyValueConfig::Section& s, const std::string& key,
                                    std::vector<double> fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_double_list(it->second, key);
}

std::vector<std::int64_t> get_int_list(const KeyValueConfig::Section& s, const std::string& key,
                                       std::vector<std::int64_t> fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_int_list(it->second, key);
}

}  // namespace driftbound

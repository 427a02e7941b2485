#include "wsi/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wsi {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

} // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  int order = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw ConfigError(origin + ":" + std::to_string(line) + ": malformed section header '" +
                              trim(raw) + "'",
                          line);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line) + ": expected key = value, got '" +
                            trim(raw) + "'",
                        line);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line) + ": empty key", line);
    cfg.sections_[section][key] = Entry{ConfigValue{value, line}, order++};
  }
  return cfg;
}

void Config::fail(const std::string& msg, int line) const {
  throw ConfigError(origin_ + (line > 0 ? ":" + std::to_string(line) : "") + ": " + msg, line);
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second.cv;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const ConfigValue* cv = find(section, key);
  return cv ? cv->value : fallback;
}

std::string Config::require(const std::string& section, const std::string& key) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) fail("missing required key [" + section + "] " + key, 0);
  return cv->value;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) return fallback;
  char* end = nullptr;
  double v = std::strtod(cv->value.c_str(), &end);
  if (end == cv->value.c_str() || *end != '\0')
    fail("[" + section + "] " + key + ": expected a number, got '" + cv->value + "'", cv->line);
  return v;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) return fallback;
  char* end = nullptr;
  long v = std::strtol(cv->value.c_str(), &end, 10);
  if (end == cv->value.c_str() || *end != '\0')
    fail("[" + section + "] " + key + ": expected an integer, got '" + cv->value + "'", cv->line);
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) return fallback;
  std::string v = cv->value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("[" + section + "] " + key + ": expected a boolean, got '" + cv->value + "'", cv->line);
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(cv->value)) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      fail("[" + section + "] " + key + ": expected numbers, got '" + item + "'", cv->line);
    out.push_back(v);
  }
  return out; // a present but empty value is an empty list, not an error
}

std::vector<std::string> Config::get_strings(const std::string& section, const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const ConfigValue* cv = find(section, key);
  if (!cv) return fallback;
  return split_list(cv->value);
}

std::vector<std::string> Config::keys(const std::string& section) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return {};
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto& [k, e] : sit->second) ordered.emplace_back(e.order, k);
  std::sort(ordered.begin(), ordered.end());
  std::vector<std::string> out;
  out.reserve(ordered.size());
  for (auto& [o, k] : ordered) out.push_back(k);
  return out;
}

} // namespace wsi

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsi {

// Minimal INI-style config: [section] headers, key = value lines, # comments.
// Later duplicates overwrite earlier ones. Every stored value remembers its
// line number so errors can point back into the file.
struct ConfigValue {
  std::string value;
  int line = 0;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& msg, int line) : std::runtime_error(msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_ = 0;
};

class Config {
public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& section, const std::string& key) const;
  // empty-string default distinguishes "absent" from "present but empty"
  const ConfigValue* find(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  // keys of one section in file order, for iterating assert tables
  std::vector<std::string> keys(const std::string& section) const;
  const std::string& origin() const { return origin_; }

private:
  struct Entry {
    ConfigValue cv;
    int order = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::string origin_;

  [[noreturn]] void fail(const std::string& msg, int line) const;
};

std::vector<std::string> split_list(const std::string& text);

} // namespace wsi

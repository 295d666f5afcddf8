#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hmcpso {

// Flat key-value configuration with [section] headers, `key = value` lines
// and '#' comments. Keys are addressed as "section.key"; lines before any
// header live in the "" section.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma- or whitespace-separated list of reals.
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace hmcpso

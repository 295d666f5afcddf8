#include "hmcpso/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hmcpso {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error(origin + " line " + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + " line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + " line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw std::runtime_error(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(origin_ + ": key '" + key + "' is not a number: " + raw);
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(origin_ + ": key '" + key + "' is not an integer: " + raw);
  }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  std::string raw = get_string(key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw std::runtime_error(origin_ + ": key '" + key + "' is not a boolean: " + raw);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::string raw = get_string(key);
  std::replace(raw.begin(), raw.end(), ',', ' ');
  std::istringstream ss(raw);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  if (!ss.eof())
    throw std::runtime_error(origin_ + ": key '" + key + "' is not a list of numbers");
  if (out.empty()) throw std::runtime_error(origin_ + ": key '" + key + "' is empty");
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

}  // namespace hmcpso

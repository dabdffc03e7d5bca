#include "autoreson/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "autoreson/grids.hpp"

namespace autoreson {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(key + ": expected a number, got '" + t + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.rfind("lin:", 0) == 0 || t.rfind("log:", 0) == 0) {
    const bool log_scale = t[0] == 'l' && t[2] == 'g';
    const auto parts = split(t.substr(4), ':');
    if (parts.size() != 3)
      throw ConfigError(key + ": grid form is lin:lo:hi:n or log:lo:hi:n");
    const double lo = parse_double(parts[0], key);
    const double hi = parse_double(parts[1], key);
    const long long n = parse_int(parts[2], key);
    if (n < 0) throw ConfigError(key + ": grid count must be >= 0");
    if (n == 0) return {};
    if (n == 1) return {lo};
    try {
      return log_scale ? logspace(lo, hi, static_cast<std::size_t>(n))
                       : linspace(lo, hi, static_cast<std::size_t>(n));
    } catch (const std::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  std::vector<double> out;
  for (const auto& piece : split(t, ',')) {
    const std::string p = trim(piece);
    if (p.empty()) continue;
    out.push_back(parse_double(p, key));
  }
  return out;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not of the form key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

void Config::set_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("--set has an empty key in '" + assignment + "'");
  kv_[key] = value;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_double(it->second, key);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_int(it->second, key);
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const long long v = parse_int(it->second, key);
  if (v < 0) throw ConfigError(key + ": seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_grid(const std::string& key,
                                     const std::string& fallback) const {
  const auto it = kv_.find(key);
  return parse_grid(it == kv_.end() ? fallback : it->second, key);
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("unknown config key '" + key + "'");
  }
}

} // namespace autoreson

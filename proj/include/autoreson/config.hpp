#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace autoreson {

// Raised for malformed or out-of-range configuration; the message names the
// offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` configuration with dotted sections (e.g. law.lambda),
// '#' comments, and command-line overrides layered on top.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);

  // Parses one `key=value` override (the --set form).
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Grid values: "a,b,c" | "lin:lo:hi:n" | "log:lo:hi:n" (n = 0 -> empty).
  std::vector<double> get_grid(const std::string& key,
                               const std::string& fallback) const;

  // Rejects any key not in `allowed` (ConfigError naming the key).
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::vector<double> parse_grid(const std::string& text, const std::string& key);

} // namespace autoreson

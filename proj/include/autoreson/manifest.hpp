#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autoreson {

// FNV-1a 64-bit hash (offset 14695981039346656037, prime 1099511628211);
// recorded in manifests under the name "fnv1a-64".
std::uint64_t fnv1a64(std::string_view bytes);

// Current wall time as ISO-8601 UTC ("2026-01-02T03:04:05Z").
std::string utc_timestamp();

// Ordered key = value provenance record, written atomically (temp file +
// rename) so partially written manifests are never observed.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value);
  void add_output(const std::string& path, std::string_view bytes);

  std::string to_text() const;
  void write_atomic(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  int n_outputs_ = 0;
};

} // namespace autoreson

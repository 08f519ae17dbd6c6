#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

namespace icprobe::scorer {

/// Content-addressed store of backend responses, one JSONL file per backend.
///
/// Records are {key, request, response, timestamp}; key is the SHA-256 of the
/// canonical request. Appends are serialized and flushed per record, so a
/// crashed run leaves a valid prefix. A file that fails to parse is reported
/// with its path and line.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path file);

  // {"body": ..., "endpoint": ...} with sorted keys, sorted candidate lists
  // and no insignificant whitespace.
  static nlohmann::json CanonicalRequest(std::string_view endpoint, nlohmann::json body);
  static std::string Key(const nlohmann::json& canonical_request);

  std::optional<nlohmann::json> Lookup(const std::string& key) const;
  void Store(const std::string& key, const nlohmann::json& request,
             const nlohmann::json& response);

  std::size_t size() const;
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, nlohmann::json> entries_;
};

// Backend ids become file names: anything outside [A-Za-z0-9._-] maps to '_'.
std::string SanitizeBackendId(std::string_view id);

}  // namespace icprobe::scorer

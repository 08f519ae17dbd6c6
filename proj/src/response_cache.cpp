#include "icprobe/response_cache.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "icprobe/error.hpp"
#include "icprobe/hashing.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::scorer {

namespace {

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) return;
  const auto lines = textio::SplitLines(textio::ReadFile(file_));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (textio::Trim(lines[i]).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(file_.string(), i + 1, "", std::string("corrupt cache record: ") + e.what());
    }
    if (!record.is_object() || !record.contains("key") || !record["key"].is_string() ||
        !record.contains("request") || !record.contains("response"))
      throw ValidationError(file_.string(), i + 1, "", "corrupt cache record: missing fields");
    const std::string key = record["key"].get<std::string>();
    if (Key(record["request"]) != key)
      throw ValidationError(file_.string(), i + 1, "key",
                            "corrupt cache record: key does not match request");
    entries_[key] = std::move(record["response"]);
  }
}

nlohmann::json ResponseCache::CanonicalRequest(std::string_view endpoint, nlohmann::json body) {
  if (body.is_object()) {
    auto it = body.find("candidates");
    if (it != body.end() && it->is_array()) std::sort(it->begin(), it->end());
  }
  return nlohmann::json{{"endpoint", std::string(endpoint)}, {"body", std::move(body)}};
}

std::string ResponseCache::Key(const nlohmann::json& canonical_request) {
  return Sha256Hex(canonical_request.dump());
}

std::optional<nlohmann::json> ResponseCache::Lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::Store(const std::string& key, const nlohmann::json& request,
                          const nlohmann::json& response) {
  std::lock_guard lock(mutex_);
  if (entries_.count(key)) return;
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to cache " + file_.string());
  nlohmann::json record = {{"key", key},
                           {"request", request},
                           {"response", response},
                           {"timestamp", UtcTimestamp()}};
  out << record.dump() << '\n';
  out.flush();
  entries_.emplace(key, response);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string SanitizeBackendId(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out.empty() ? "backend" : out;
}

}  // namespace icprobe::scorer

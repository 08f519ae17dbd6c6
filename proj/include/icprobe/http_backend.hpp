#pragma once

// Backend that talks JSON over HTTP to an inference sidecar.
//
//   POST /v1/cloze         {text, blank_marker, candidates} -> {probs, top_token}
//   POST /v1/continuation  {prefix, candidates}             -> {probs, top_token}
//   POST /v1/sequence      {text}                           -> {mean_token_prob}
//   POST /v1/discriminate  {text} -> {per_token_original_prob, mean_original_prob}
//   POST /v1/embed         {text, word_index}               -> {vector, dim}
//   GET  /v1/capabilities                                   -> {cloze, continuation, ...}

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "icprobe/response_cache.hpp"
#include "icprobe/scorer.hpp"

namespace icprobe::scorer {

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws BackendError / ProtocolError / UnscorableError; returns the parsed body.
  virtual nlohmann::json Post(const std::string& path, const nlohmann::json& body) = 0;
  virtual nlohmann::json Get(const std::string& path) = 0;
};

std::unique_ptr<Transport> MakeHttpTransport(const std::string& endpoint,
                                             std::chrono::milliseconds timeout);

enum class SequenceAggregate { kMeanProb, kMeanLogProb };

struct HttpBackendOptions {
  std::string backend_id;  // defaults to a sanitized endpoint
  std::optional<std::filesystem::path> cache_dir;
  int attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubles after each failed attempt
  std::chrono::milliseconds timeout{60000};
  SequenceAggregate sequence_aggregate = SequenceAggregate::kMeanProb;
  std::optional<Capabilities> capabilities;  // skip /v1/capabilities when set
};

class HttpBackend : public Backend {
 public:
  HttpBackend(std::string endpoint, HttpBackendOptions options);
  HttpBackend(std::string endpoint, HttpBackendOptions options,
              std::unique_ptr<Transport> transport);

  std::string id() const override { return backend_id_; }
  Capabilities capabilities() override;
  CandidateScores Score(const StimulusVariant& variant, const ScoreMethod& method) override;
  std::vector<double> Embed(const EmbedRequest& request) override;

  // Requests that reached the transport (cache misses, including retries).
  std::size_t network_requests() const { return network_requests_.load(); }
  const std::string& endpoint() const { return endpoint_; }

  // Validated single request, served from the cache when possible.
  nlohmann::json Request(const std::string& path, nlohmann::json body);

 private:
  nlohmann::json SendWithRetry(const std::string& path, const nlohmann::json& body, bool get);

  std::string endpoint_;
  HttpBackendOptions options_;
  std::string backend_id_;
  std::unique_ptr<Transport> transport_;
  std::unique_ptr<ResponseCache> cache_;
  std::atomic<std::size_t> network_requests_{0};
};

// Throws ProtocolError unless the response matches the endpoint's schema.
void ValidateResponse(const std::string& path, const nlohmann::json& request,
                      const nlohmann::json& response);

}  // namespace icprobe::scorer

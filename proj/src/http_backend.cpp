#include "icprobe/http_backend.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>

#include "icprobe/error.hpp"

namespace icprobe::scorer {

namespace {

using nlohmann::json;

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string endpoint, std::chrono::milliseconds timeout)
      : endpoint_(std::move(endpoint)), timeout_(timeout) {}

  json Post(const std::string& path, const json& body) override {
    auto client = MakeClient();
    return Handle(path, client.Post(path, body.dump(), "application/json"));
  }

  json Get(const std::string& path) override {
    auto client = MakeClient();
    return Handle(path, client.Get(path));
  }

 private:
  httplib::Client MakeClient() const {
    httplib::Client client(endpoint_);
    if (!client.is_valid()) throw BackendError("invalid endpoint '" + endpoint_ + "'", false);
    const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - sec);
    client.set_connection_timeout(sec.count(), usec.count());
    client.set_read_timeout(sec.count(), usec.count());
    client.set_write_timeout(sec.count(), usec.count());
    return client;
  }

  json Handle(const std::string& path, const httplib::Result& res) const {
    const std::string where = endpoint_ + path;
    if (!res) throw BackendError(where + ": " + httplib::to_string(res.error()), true);
    const int status = res->status;
    if (status == 422) throw UnscorableError(where + ": candidate unscorable: " + res->body);
    if (status == 400) throw ProtocolError(where + ": server rejected request: " + res->body);
    if (status == 429 || status >= 500)
      throw BackendError(where + ": HTTP " + std::to_string(status), true);
    if (status != 200) throw BackendError(where + ": HTTP " + std::to_string(status), false);
    try {
      return json::parse(res->body);
    } catch (const json::parse_error&) {
      throw ProtocolError(where + ": malformed JSON response");
    }
  }

  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

bool IsProbability(const json& v) {
  if (!v.is_number()) return false;
  const double p = v.get<double>();
  return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

[[noreturn]] void Violation(const std::string& path, const std::string& what) {
  throw ProtocolError(path + ": protocol violation: " + what);
}

void ValidateTokenProbs(const std::string& path, const json& request, const json& response) {
  auto probs = response.find("probs");
  if (probs == response.end() || !probs->is_object()) Violation(path, "missing 'probs' object");
  for (const auto& cand : request.at("candidates")) {
    auto it = probs->find(cand.get<std::string>());
    if (it == probs->end()) Violation(path, "no probability for candidate " + cand.dump());
    if (!IsProbability(*it)) Violation(path, "probability out of [0,1] for " + cand.dump());
  }
  if (response.contains("top_token") && !response["top_token"].is_string() &&
      !response["top_token"].is_null())
    Violation(path, "'top_token' must be a string");
}

std::string EndpointToId(const std::string& endpoint) {
  std::string id = endpoint;
  if (auto pos = id.find("://"); pos != std::string::npos) id = id.substr(pos + 3);
  return SanitizeBackendId("http_" + id);
}

}  // namespace

std::unique_ptr<Transport> MakeHttpTransport(const std::string& endpoint,
                                             std::chrono::milliseconds timeout) {
  return std::make_unique<HttpTransport>(endpoint, timeout);
}

void ValidateResponse(const std::string& path, const json& request, const json& response) {
  if (!response.is_object()) Violation(path, "response is not a JSON object");
  if (path == "/v1/cloze" || path == "/v1/continuation") {
    ValidateTokenProbs(path, request, response);
  } else if (path == "/v1/sequence") {
    if (request.value("aggregate", "mean_prob") == "mean_logprob") {
      auto it = response.find("mean_token_logprob");
      if (it == response.end() || !it->is_number() || !std::isfinite(it->get<double>()) ||
          it->get<double>() > 0.0)
        Violation(path, "'mean_token_logprob' must be a finite number <= 0");
    } else {
      auto it = response.find("mean_token_prob");
      if (it == response.end() || !IsProbability(*it))
        Violation(path, "'mean_token_prob' must be a probability");
    }
  } else if (path == "/v1/discriminate") {
    auto per = response.find("per_token_original_prob");
    auto mean = response.find("mean_original_prob");
    if (per == response.end() || !per->is_array())
      Violation(path, "missing 'per_token_original_prob' array");
    if (mean == response.end() || !IsProbability(*mean))
      Violation(path, "'mean_original_prob' must be a probability");
    double sum = 0.0;
    for (const auto& p : *per) {
      if (!IsProbability(p)) Violation(path, "per-token probability out of [0,1]");
      sum += p.get<double>();
    }
    if (!per->empty() && std::abs(sum / per->size() - mean->get<double>()) > 1e-6)
      Violation(path, "'mean_original_prob' is not the mean of the per-token values");
  } else if (path == "/v1/embed") {
    auto vec = response.find("vector");
    auto dim = response.find("dim");
    if (vec == response.end() || !vec->is_array() || vec->empty())
      Violation(path, "missing 'vector' array");
    if (dim == response.end() || !dim->is_number_integer() ||
        dim->get<long long>() != static_cast<long long>(vec->size()))
      Violation(path, "'dim' does not match the vector length");
    for (const auto& x : *vec) {
      if (!x.is_number() || !std::isfinite(x.get<double>()))
        Violation(path, "non-finite embedding entry");
    }
  } else if (path == "/v1/capabilities") {
    for (const char* flag : {"cloze", "continuation", "sequence", "discriminate", "embed"}) {
      if (!response.contains(flag) || !response[flag].is_boolean())
        Violation(path, std::string("missing boolean '") + flag + "'");
    }
  } else {
    Violation(path, "unknown endpoint");
  }
}

HttpBackend::HttpBackend(std::string endpoint, HttpBackendOptions options)
    : HttpBackend(endpoint, options, MakeHttpTransport(endpoint, options.timeout)) {}

HttpBackend::HttpBackend(std::string endpoint, HttpBackendOptions options,
                         std::unique_ptr<Transport> transport)
    : endpoint_(std::move(endpoint)),
      options_(std::move(options)),
      backend_id_(options_.backend_id.empty() ? EndpointToId(endpoint_)
                                              : SanitizeBackendId(options_.backend_id)),
      transport_(std::move(transport)) {
  if (options_.attempts < 1) throw ValidationError("attempts must be >= 1");
  if (options_.cache_dir)
    cache_ = std::make_unique<ResponseCache>(*options_.cache_dir / (backend_id_ + ".jsonl"));
}

json HttpBackend::SendWithRetry(const std::string& path, const json& body, bool get) {
  auto delay = options_.backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      ++network_requests_;
      return get ? transport_->Get(path) : transport_->Post(path, body);
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= options_.attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

json HttpBackend::Request(const std::string& path, json body) {
  const bool get = path == "/v1/capabilities";
  json canonical = ResponseCache::CanonicalRequest(path, std::move(body));
  const std::string key = ResponseCache::Key(canonical);
  if (cache_) {
    if (auto hit = cache_->Lookup(key)) {
      ValidateResponse(path, canonical["body"], *hit);
      return *hit;
    }
  }
  json response = SendWithRetry(path, canonical["body"], get);
  ValidateResponse(path, canonical["body"], response);
  if (cache_) cache_->Store(key, canonical, response);
  return response;
}

Capabilities HttpBackend::capabilities() {
  if (options_.capabilities) return *options_.capabilities;
  const json r = Request("/v1/capabilities", json::object());
  Capabilities caps{r["cloze"].get<bool>(), r["continuation"].get<bool>(),
                    r["sequence"].get<bool>(), r["discriminate"].get<bool>(),
                    r["embed"].get<bool>()};
  if (!caps.CanScore() && !caps.embed)
    throw ProtocolError(endpoint_ + "/v1/capabilities: backend advertises no capability");
  return caps;
}

CandidateScores HttpBackend::Score(const StimulusVariant& variant, const ScoreMethod& method) {
  CandidateScores out;
  auto token_probs = [&](const json& r) {
    for (auto& [tok, p] : r["probs"].items()) out.scores[tok] = p.get<double>();
    if (r.contains("top_token") && r["top_token"].is_string())
      out.top_token = r["top_token"].get<std::string>();
  };
  auto sequence = [&](const std::string& text) {
    json body = {{"text", text}};
    if (options_.sequence_aggregate == SequenceAggregate::kMeanLogProb) {
      body["aggregate"] = "mean_logprob";
      return Request("/v1/sequence", body)["mean_token_logprob"].get<double>();
    }
    return Request("/v1/sequence", body)["mean_token_prob"].get<double>();
  };

  if (const auto* m = std::get_if<ClozeMethod>(&method)) {
    token_probs(Request("/v1/cloze", {{"text", variant.text},
                                      {"blank_marker", std::string(stimgen::kBlank)},
                                      {"candidates", m->candidates}}));
  } else if (const auto* m = std::get_if<ContinuationMethod>(&method)) {
    token_probs(Request("/v1/continuation", {{"prefix", variant.text},
                                             {"candidates", m->candidates}}));
  } else if (const auto* m = std::get_if<SequencePairMethod>(&method)) {
    out.scores["he"] = sequence(m->text_he);
    out.scores["she"] = sequence(m->text_she);
    out.probability_valued = options_.sequence_aggregate == SequenceAggregate::kMeanProb;
  } else if (const auto* m = std::get_if<DiscriminativePairMethod>(&method)) {
    out.scores["he"] = Request("/v1/discriminate", {{"text", m->text_he}})["mean_original_prob"]
                           .get<double>();
    out.scores["she"] = Request("/v1/discriminate", {{"text", m->text_she}})["mean_original_prob"]
                            .get<double>();
  } else {
    throw CapabilityError("embed is not a pronoun scoring method");
  }
  return out;
}

std::vector<double> HttpBackend::Embed(const EmbedRequest& request) {
  const json r = Request("/v1/embed", {{"text", request.text}, {"word_index", request.word_index}});
  return r["vector"].get<std::vector<double>>();
}

}  // namespace icprobe::scorer

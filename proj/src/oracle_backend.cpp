#include "icprobe/oracle_backend.hpp"

#include <algorithm>
#include <cmath>

#include "icprobe/error.hpp"
#include "icprobe/hashing.hpp"

namespace icprobe::scorer {

OracleBackend::OracleBackend(std::map<std::string, double> targets, OracleOptions options)
    : targets_(std::move(targets)), options_(std::move(options)) {
  for (const auto& [verb, beta] : targets_) {
    if (!std::isfinite(beta) || beta < -100.0 || beta > 100.0)
      throw ValidationError("oracle target for '" + verb + "' must lie in [-100, 100]");
  }
  if (options_.embed_dim == 0) throw ValidationError("oracle embed_dim must be positive");
}

double OracleBackend::Target(const std::string& verb_id) const {
  auto it = targets_.find(verb_id);
  if (it == targets_.end()) throw UnscorableError("oracle has no target for verb '" + verb_id + "'");
  return it->second;
}

std::size_t OracleBackend::SubjectWinsTarget(const std::string& verb_id) const {
  const double rounded = std::nearbyint(Target(verb_id));
  return static_cast<std::size_t>(std::clamp(rounded + 100.0, 0.0, 200.0));
}

CandidateScores OracleBackend::Score(const StimulusVariant& variant, const ScoreMethod& method) {
  if (std::holds_alternative<EmbedMethod>(method))
    throw CapabilityError("oracle: embed requests go through Embed()");
  const bool subject_wins = variant.variant_index < SubjectWinsTarget(variant.verb_id);
  const double p_s = subject_wins ? 0.75 : 0.25;
  const double p_o = 1.0 - p_s;

  CandidateScores out;
  out.scores[std::string(PronounFor(variant.subject_gender))] = p_s;
  out.scores[std::string(PronounFor(variant.object_gender()))] = p_o;
  out.scores["he"] += options_.he_shift;
  out.probability_valued = options_.he_shift == 0.0;
  if (std::holds_alternative<ClozeMethod>(method) ||
      std::holds_alternative<ContinuationMethod>(method)) {
    out.top_token = out.scores["he"] >= out.scores["she"] ? "he" : "she";
  }
  return out;
}

std::vector<double> OracleBackend::Embed(const EmbedRequest& request) {
  const double beta = Target(request.verb_id);
  std::vector<double> v(options_.embed_dim);
  v[0] = beta / 100.0;
  SplitMix64 rng(Fnv1a64(request.verb_id) ^ DeriveSeed(request.variant_index, 0x0E3Bu));
  for (std::size_t i = 1; i < v.size(); ++i) {
    v[i] = options_.embed_noise * (2.0 * rng.NextUnit() - 1.0);
  }
  return v;
}

}  // namespace icprobe::scorer

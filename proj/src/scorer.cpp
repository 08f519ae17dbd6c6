#include "icprobe/scorer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "icprobe/error.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::scorer {

using stimgen::ModeKind;

std::string_view PronounFor(lexicon::Gender g) {
  return g == lexicon::Gender::kMale ? "he" : "she";
}

std::string_view MethodName(const ScoreMethod& method) {
  static constexpr std::string_view kNames[] = {"cloze", "continuation", "sequence_pair",
                                                "discriminative_pair", "embed"};
  return kNames[method.index()];
}

ScoreMethod ChooseMethod(const Capabilities& caps, const stimgen::Mode& mode) {
  const std::string mode_name(stimgen::ToString(mode.kind));
  switch (mode.kind) {
    case ModeKind::kOpenEnded:
      if (caps.continuation) return ContinuationMethod{kEnglishCandidates};
      break;
    case ModeKind::kClozeNonce:
    case ModeKind::kSwappedCloze:
      if (caps.cloze) return ClozeMethod{kEnglishCandidates};
      if (caps.discriminate) return DiscriminativePairMethod{};
      break;
    case ModeKind::kExplanation:
      if (caps.cloze) return ClozeMethod{kEnglishCandidates};
      if (caps.discriminate) return DiscriminativePairMethod{};
      if (caps.sequence) return SequencePairMethod{};
      break;
  }
  throw CapabilityError("backend has no scoring method for mode '" + mode_name + "'");
}

ScoreMethod BindMethod(ScoreMethod method, const StimulusVariant& variant) {
  auto bind = [&](auto& m) {
    m.text_he = stimgen::FillBlank(variant.text, "he");
    m.text_she = stimgen::FillBlank(variant.text, "she");
  };
  if (auto* seq = std::get_if<SequencePairMethod>(&method)) bind(*seq);
  if (auto* dis = std::get_if<DiscriminativePairMethod>(&method)) bind(*dis);
  return method;
}

PronounScores ScoreStimulus(Backend& backend, const StimulusVariant& variant,
                            const ScoreMethod& method) {
  if (std::holds_alternative<EmbedMethod>(method))
    throw CapabilityError("embed is not a pronoun scoring method");
  const ScoreMethod bound = BindMethod(method, variant);
  CandidateScores answer = backend.Score(variant, bound);

  auto fetch = [&](std::string_view pronoun) {
    auto it = answer.scores.find(std::string(pronoun));
    if (it == answer.scores.end())
      throw ProtocolError(variant.Id() + ": backend returned no score for '" +
                          std::string(pronoun) + "'");
    const double p = it->second;
    if (!std::isfinite(p))
      throw ProtocolError(variant.Id() + ": non-finite score for '" + std::string(pronoun) + "'");
    if (answer.probability_valued && (p < 0.0 || p > 1.0))
      throw ProtocolError(variant.Id() + ": probability out of range for '" +
                          std::string(pronoun) + "': " + textio::FormatDouble(p));
    return p;
  };

  PronounScores out;
  out.p_s = fetch(PronounFor(variant.subject_gender));
  out.p_o = fetch(PronounFor(variant.object_gender()));
  out.top_token = answer.top_token;
  out.by_pronoun = std::move(answer.scores);
  out.method = std::string(MethodName(method));
  return out;
}

std::vector<PronounScores> ScoreAll(Backend& backend, std::span<const StimulusVariant> variants,
                                    std::size_t parallelism) {
  std::vector<PronounScores> results(variants.size());
  if (variants.empty()) return results;
  const Capabilities caps = backend.capabilities();

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= variants.size() || failed.load()) return;
      try {
        const auto method = ChooseMethod(caps, variants[i].mode);
        results[i] = ScoreStimulus(backend, variants[i], method);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(parallelism, variants.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace icprobe::scorer

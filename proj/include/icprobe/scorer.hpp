#pragma once

// Model-agnostic pronoun scoring. A Backend answers one of five request
// shapes; ChooseMethod picks the shape a backend can serve for a stimulus
// mode and ScoreStimulus maps the answer onto subject/object roles.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "icprobe/stimgen.hpp"

namespace icprobe::scorer {

using stimgen::StimulusVariant;

// English candidate pronouns, in canonical (sorted) order.
inline const std::vector<std::string> kEnglishCandidates = {"he", "she"};

std::string_view PronounFor(lexicon::Gender g);

struct Capabilities {
  bool cloze = false;
  bool continuation = false;
  bool sequence = false;
  bool discriminate = false;
  bool embed = false;

  bool CanScore() const { return cloze || continuation || sequence || discriminate; }
  static Capabilities All() { return {true, true, true, true, true}; }
  bool operator==(const Capabilities&) const = default;
};

struct ClozeMethod {
  std::vector<std::string> candidates;
  bool operator==(const ClozeMethod&) const = default;
};
struct ContinuationMethod {
  std::vector<std::string> candidates;
  bool operator==(const ContinuationMethod&) const = default;
};
// Whole-sentence scoring of the two pronoun fillings. Texts are empty until
// bound to a stimulus.
struct SequencePairMethod {
  std::string text_he;
  std::string text_she;
  bool operator==(const SequencePairMethod&) const = default;
};
struct DiscriminativePairMethod {
  std::string text_he;
  std::string text_she;
  bool operator==(const DiscriminativePairMethod&) const = default;
};
struct EmbedMethod {
  std::size_t word_index = 0;
  bool operator==(const EmbedMethod&) const = default;
};

using ScoreMethod = std::variant<ClozeMethod, ContinuationMethod, SequencePairMethod,
                                 DiscriminativePairMethod, EmbedMethod>;

std::string_view MethodName(const ScoreMethod& method);

/// Preference: cloze, then discriminative pair, then sequence pair for
/// full-sentence modes; continuation only for open-ended stimuli. Throws
/// CapabilityError when nothing fits.
ScoreMethod ChooseMethod(const Capabilities& caps, const stimgen::Mode& mode);

// Fill the pair texts of a pair method from the stimulus; other methods are
// returned unchanged.
ScoreMethod BindMethod(ScoreMethod method, const StimulusVariant& variant);

/// Backend answer for one stimulus, keyed by pronoun.
struct CandidateScores {
  std::map<std::string, double> scores;
  std::optional<std::string> top_token;
  bool probability_valued = true;
};

struct PronounScores {
  double p_s = 0.0;  // pronoun matching the subject's gender
  double p_o = 0.0;
  std::optional<std::string> top_token;
  std::map<std::string, double> by_pronoun;  // raw, before role mapping
  std::string method;

  bool operator==(const PronounScores&) const = default;
};

// A stimulus together with the scores a backend produced for it.
struct ScoredStimulus {
  StimulusVariant stimulus;
  PronounScores scores;

  bool operator==(const ScoredStimulus&) const = default;
};

struct EmbedRequest {
  std::string verb_id;
  std::size_t variant_index = 0;
  std::string text;
  std::size_t word_index = 0;
};

// Implementations must accept concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual Capabilities capabilities() = 0;
  virtual CandidateScores Score(const StimulusVariant& variant, const ScoreMethod& method) = 0;
  virtual std::vector<double> Embed(const EmbedRequest& request) = 0;
};

PronounScores ScoreStimulus(Backend& backend, const StimulusVariant& variant,
                            const ScoreMethod& method);

/// Scores every stimulus with at most `parallelism` requests in flight.
/// Output order follows the input; the first failure is rethrown.
std::vector<PronounScores> ScoreAll(Backend& backend, std::span<const StimulusVariant> variants,
                                    std::size_t parallelism = 4);

}  // namespace icprobe::scorer

#pragma once

// Input materials: verbs with human IC norms, name pools, nonce words and
// the explanation pairs used for the congruency experiment.
//
// Every loader validates as it reads and throws ValidationError with the
// file, 1-based line and field of the first violation. Loaded values are
// plain immutable data.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icprobe::lexicon {

inline constexpr std::string_view kSubjectSlot = "{SUBJ}";
inline constexpr std::string_view kObjectSlot = "{OBJ}";
inline constexpr std::size_t kPoolSize = 10;

enum class Gender { kMale, kFemale };

std::string_view ToString(Gender g);
Gender OtherGender(Gender g);

/// One interpersonal verb and its human bias norm.
///
/// `frame_past` is a pre-inflected surface template, e.g.
/// "{SUBJ} apologized to {OBJ}". Both slots are standalone words and the
/// subject slot comes first. `human_bias` lies in [-100, 100]; positive
/// values attribute the cause to the subject.
struct VerbEntry {
  std::string id;
  std::string lemma;
  std::string frame_past;
  double human_bias = 0.0;
  std::string language;

  bool operator==(const VerbEntry&) const = default;
};

struct NamePool {
  std::array<std::string, kPoolSize> male;
  std::array<std::string, kPoolSize> female;

  const std::array<std::string, kPoolSize>& names(Gender g) const {
    return g == Gender::kMale ? male : female;
  }
  bool operator==(const NamePool&) const = default;
};

struct NonceLexicon {
  std::vector<std::string> words;

  bool operator==(const NonceLexicon&) const = default;
};

/// Two endings for one verb. `subj_expl` unambiguously refers to the
/// subject and `obj_expl` to the object; both start with a verb phrase,
/// e.g. "had done well". Stored without a final period.
struct ExplanationPair {
  std::string verb_id;
  std::string subj_expl;
  std::string obj_expl;

  bool operator==(const ExplanationPair&) const = default;
};

// Throws ValidationError (file/line empty) if an invariant is violated.
void Validate(const VerbEntry& verb);
void Validate(const NamePool& pool);
void Validate(const NonceLexicon& lexicon);
void Validate(const ExplanationPair& pair);

// Whitespace word index of the verb in the rendered frame, i.e. the word
// right after the subject slot.
std::size_t VerbWordIndex(const VerbEntry& verb);

// Fill both slots of the frame.
std::string RenderFrame(const VerbEntry& verb, std::string_view subject,
                        std::string_view object);

std::vector<VerbEntry> ParseVerbs(std::string_view text, const std::string& source);
NamePool ParseNames(std::string_view text, const std::string& source);
NonceLexicon ParseNonce(std::string_view text, const std::string& source);
std::vector<ExplanationPair> ParseExplanations(std::string_view text,
                                               const std::string& source);

std::vector<VerbEntry> LoadVerbs(const std::filesystem::path& path);
NamePool LoadNames(const std::filesystem::path& path);
NonceLexicon LoadNonce(const std::filesystem::path& path);
std::vector<ExplanationPair> LoadExplanations(const std::filesystem::path& path);

// Canonical file forms. Parse(Serialize(x)) == x for every valid x.
std::string SerializeVerbs(std::span<const VerbEntry> verbs);
std::string SerializeNames(const NamePool& pool);
std::string SerializeNonce(const NonceLexicon& lexicon);
std::string SerializeExplanations(std::span<const ExplanationPair> pairs);

const ExplanationPair* FindExplanation(std::span<const ExplanationPair> pairs,
                                       std::string_view verb_id);

}  // namespace icprobe::lexicon

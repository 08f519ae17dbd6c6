#pragma once

// Deterministic stimulus enumeration: 200 name variants per verb, each with
// its own nonce word in the nonce modes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icprobe/lexicon.hpp"

namespace icprobe::stimgen {

using lexicon::Gender;

inline constexpr std::string_view kBlank = "___";
inline constexpr std::size_t kVariantsPerVerb = 2 * lexicon::kPoolSize * lexicon::kPoolSize;
inline constexpr double kStrongBiasThreshold = 65.0;

enum class ModeKind { kClozeNonce, kOpenEnded, kSwappedCloze, kExplanation };
enum class Referent { kSubject, kObject };
enum class Congruency { kCongruent, kIncongruent, kNeutral, kNotApplicable };

struct Mode {
  ModeKind kind = ModeKind::kClozeNonce;
  std::optional<Referent> target;  // set iff kind == kExplanation

  static Mode ClozeNonce() { return {ModeKind::kClozeNonce, std::nullopt}; }
  static Mode OpenEnded() { return {ModeKind::kOpenEnded, std::nullopt}; }
  static Mode SwappedCloze() { return {ModeKind::kSwappedCloze, std::nullopt}; }
  static Mode Explanation(Referent target) { return {ModeKind::kExplanation, target}; }

  bool UsesNonce() const {
    return kind == ModeKind::kClozeNonce || kind == ModeKind::kSwappedCloze;
  }
  bool operator==(const Mode&) const = default;
};

std::string_view ToString(ModeKind kind);
std::string_view ToString(Referent r);
std::string_view ToString(Congruency c);
ModeKind ParseModeKind(std::string_view name);  // wire names or CLI short names
Referent ParseReferent(std::string_view name);
Congruency ParseCongruency(std::string_view name);

// "cloze_nonce", "explanation_subject", ...
std::string ModeTag(const Mode& mode);

struct NamePair {
  std::string subject;
  std::string object;
  Gender subject_gender = Gender::kMale;

  bool operator==(const NamePair&) const = default;
};

struct StimulusVariant {
  std::string verb_id;
  std::size_t variant_index = 0;
  std::string subject_name;
  std::string object_name;
  Gender subject_gender = Gender::kMale;
  std::optional<std::string> nonce_word;
  Mode mode;
  std::string text;
  Congruency congruency = Congruency::kNotApplicable;

  // "<verb_id>/<mode tag>/<variant_index>", unique within a run.
  std::string Id() const;
  Gender object_gender() const { return lexicon::OtherGender(subject_gender); }

  bool operator==(const StimulusVariant&) const = default;
};

/// All 200 (subject, object) pairings of a pool: male subjects first ordered
/// by (male index, female index), then female subjects ordered by
/// (female index, male index). Genders always differ.
std::vector<NamePair> EnumerateNamePairs(const lexicon::NamePool& pool);

/// Fisher-Yates permutation of the first 200 lexicon words driven by
/// SplitMix64(seed). Throws ValidationError if the lexicon is too small.
std::vector<std::string> AssignNonce(const lexicon::NonceLexicon& lexicon, std::uint64_t seed);

// seed XOR FNV-1a(verb_id)
std::uint64_t VerbSeed(std::uint64_t seed, std::string_view verb_id);

Congruency LabelCongruency(const lexicon::VerbEntry& verb, Referent target,
                           double strong_threshold = kStrongBiasThreshold);

/// Render the 200 variants of one verb in one mode. `explanation` is
/// required for Explanation mode and ignored otherwise.
std::vector<StimulusVariant> Generate(const lexicon::VerbEntry& verb, const Mode& mode,
                                      const lexicon::NamePool& pool,
                                      const lexicon::NonceLexicon& nonce, std::uint64_t seed,
                                      const lexicon::ExplanationPair* explanation = nullptr,
                                      double strong_threshold = kStrongBiasThreshold);

// The stimulus with the blank replaced by `filler`.
std::string FillBlank(std::string_view text, std::string_view filler);

}  // namespace icprobe::stimgen

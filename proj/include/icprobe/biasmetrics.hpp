#pragma once

// Verb-level IC bias from per-stimulus pronoun scores.
//
// A stimulus is a subject win when p_s - p_o > 0 and an object win when it
// is < 0; exact zeros are ties and count for neither side. The bias of a
// verb is 100 (s - o) / (s + o), undefined when every stimulus tied.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icprobe/scorer.hpp"

namespace icprobe::biasmetrics {

using scorer::PronounScores;
using scorer::ScoredStimulus;

enum class Polarity { kSubject, kObject, kZero };

std::string_view ToString(Polarity p);  // "S", "O", "Zero"
Polarity ParsePolarity(std::string_view s);
Polarity PolarityOf(double bias);
Polarity PolarityOf(const std::optional<double>& bias);  // undefined -> Zero

struct Tally {
  std::size_t s_wins = 0;
  std::size_t o_wins = 0;
  std::size_t ties = 0;

  std::size_t n() const { return s_wins + o_wins + ties; }
  bool operator==(const Tally&) const = default;
};

// Throws ValidationError on an empty list or a non-finite score.
Tally CountWins(std::span<const PronounScores> scores);

std::optional<double> BiasScore(std::size_t s_wins, std::size_t o_wins);

struct VerbBiasResult {
  std::string verb_id;
  Tally tally;
  std::optional<double> bias;
  Polarity polarity = Polarity::kZero;
};

VerbBiasResult ComputeVerbBias(const std::string& verb_id, std::span<const PronounScores> scores);

// One result per verb, in order of first appearance.
std::vector<VerbBiasResult> ComputeAllVerbBias(std::span<const ScoredStimulus> responses);

struct DiscountKey {
  std::string pronoun;
  lexicon::Gender subject_gender = lexicon::Gender::kMale;
  std::string nonce_word;  // empty for modes without a nonce slot

  auto operator<=>(const DiscountKey&) const = default;
};

struct DiscountGroup {
  double mean = 0.0;
  std::size_t count = 0;
};

/// Group means of raw pronoun scores keyed by (pronoun, subject gender,
/// nonce word), pooled over every verb of one run.
class DiscountTable {
 public:
  explicit DiscountTable(std::map<DiscountKey, DiscountGroup> groups);

  const DiscountGroup& at(const DiscountKey& key) const;  // ValidationError if missing
  const std::map<DiscountKey, DiscountGroup>& groups() const { return groups_; }

 private:
  std::map<DiscountKey, DiscountGroup> groups_;
};

// Responses must come from one backend and one mode kind.
DiscountTable ComputeDiscountTable(std::span<const ScoredStimulus> responses);

// Subtracts the group mean from each pronoun score, then maps to roles.
PronounScores ApplyDiscount(const ScoredStimulus& response, const DiscountTable& table);

std::vector<ScoredStimulus> ApplyDiscount(std::span<const ScoredStimulus> responses,
                                          const DiscountTable& table);

/// Share of stimuli whose top token is one of the candidates, over the
/// stimuli that report a top token. Throws if none does.
double TopRankRate(std::span<const ScoredStimulus> responses,
                   std::span<const std::string> candidates = scorer::kEnglishCandidates);

}  // namespace icprobe::biasmetrics

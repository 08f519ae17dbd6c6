#include "icprobe/biasmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "icprobe/error.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::biasmetrics {

std::string_view ToString(Polarity p) {
  switch (p) {
    case Polarity::kSubject: return "S";
    case Polarity::kObject: return "O";
    case Polarity::kZero: return "Zero";
  }
  return "?";
}

Polarity ParsePolarity(std::string_view s) {
  if (s == "S") return Polarity::kSubject;
  if (s == "O") return Polarity::kObject;
  if (s == "Zero") return Polarity::kZero;
  throw ValidationError("unknown polarity '" + std::string(s) + "'");
}

Polarity PolarityOf(double bias) {
  if (bias > 0.0) return Polarity::kSubject;
  if (bias < 0.0) return Polarity::kObject;
  return Polarity::kZero;
}

Polarity PolarityOf(const std::optional<double>& bias) {
  return bias ? PolarityOf(*bias) : Polarity::kZero;
}

Tally CountWins(std::span<const PronounScores> scores) {
  if (scores.empty()) throw ValidationError("cannot tally an empty score list");
  Tally t;
  for (const auto& s : scores) {
    if (!std::isfinite(s.p_s) || !std::isfinite(s.p_o))
      throw ValidationError("non-finite pronoun score");
    const double diff = s.p_s - s.p_o;
    if (diff > 0.0) {
      ++t.s_wins;
    } else if (diff < 0.0) {
      ++t.o_wins;
    } else {
      ++t.ties;
    }
  }
  return t;
}

std::optional<double> BiasScore(std::size_t s_wins, std::size_t o_wins) {
  if (s_wins + o_wins == 0) return std::nullopt;
  const double s = static_cast<double>(s_wins);
  const double o = static_cast<double>(o_wins);
  return 100.0 * (s - o) / (s + o);
}

VerbBiasResult ComputeVerbBias(const std::string& verb_id,
                               std::span<const PronounScores> scores) {
  VerbBiasResult r;
  r.verb_id = verb_id;
  r.tally = CountWins(scores);
  r.bias = BiasScore(r.tally.s_wins, r.tally.o_wins);
  r.polarity = PolarityOf(r.bias);
  return r;
}

std::vector<VerbBiasResult> ComputeAllVerbBias(std::span<const ScoredStimulus> responses) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<PronounScores>> by_verb;
  for (const auto& r : responses) {
    auto [it, fresh] = by_verb.try_emplace(r.stimulus.verb_id);
    if (fresh) order.push_back(r.stimulus.verb_id);
    it->second.push_back(r.scores);
  }
  std::vector<VerbBiasResult> out;
  out.reserve(order.size());
  for (const auto& verb : order) out.push_back(ComputeVerbBias(verb, by_verb[verb]));
  return out;
}

DiscountTable::DiscountTable(std::map<DiscountKey, DiscountGroup> groups)
    : groups_(std::move(groups)) {}

const DiscountGroup& DiscountTable::at(const DiscountKey& key) const {
  auto it = groups_.find(key);
  if (it == groups_.end())
    throw ValidationError("no discount group for (" + key.pronoun + ", " +
                          std::string(lexicon::ToString(key.subject_gender)) + ", '" +
                          key.nonce_word + "')");
  return it->second;
}

namespace {

DiscountKey KeyFor(const ScoredStimulus& r, const std::string& pronoun) {
  return {pronoun, r.stimulus.subject_gender, r.stimulus.nonce_word.value_or("")};
}

}  // namespace

DiscountTable ComputeDiscountTable(std::span<const ScoredStimulus> responses) {
  if (responses.empty()) throw ValidationError("cannot build a discount table from no responses");
  const auto kind = responses.front().stimulus.mode.kind;
  std::map<DiscountKey, std::pair<double, std::size_t>> sums;
  for (const auto& r : responses) {
    if (r.stimulus.mode.kind != kind)
      throw ValidationError("discounting needs responses from a single mode");
    for (const auto& pronoun : scorer::kEnglishCandidates) {
      auto it = r.scores.by_pronoun.find(pronoun);
      if (it == r.scores.by_pronoun.end())
        throw ValidationError(r.stimulus.Id() + ": no raw score for '" + pronoun + "'");
      auto& [sum, count] = sums[KeyFor(r, pronoun)];
      sum += it->second;
      ++count;
    }
  }
  std::map<DiscountKey, DiscountGroup> groups;
  for (const auto& [key, acc] : sums) {
    groups.emplace(key, DiscountGroup{acc.first / static_cast<double>(acc.second), acc.second});
  }
  return DiscountTable(std::move(groups));
}

PronounScores ApplyDiscount(const ScoredStimulus& response, const DiscountTable& table) {
  PronounScores out = response.scores;
  for (auto& [pronoun, value] : out.by_pronoun) {
    value -= table.at(KeyFor(response, pronoun)).mean;
  }
  auto role = [&](lexicon::Gender g) {
    auto it = out.by_pronoun.find(std::string(scorer::PronounFor(g)));
    if (it == out.by_pronoun.end())
      throw ValidationError(response.stimulus.Id() + ": missing pronoun score");
    return it->second;
  };
  out.p_s = role(response.stimulus.subject_gender);
  out.p_o = role(response.stimulus.object_gender());
  return out;
}

std::vector<ScoredStimulus> ApplyDiscount(std::span<const ScoredStimulus> responses,
                                          const DiscountTable& table) {
  std::vector<ScoredStimulus> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back({r.stimulus, ApplyDiscount(r, table)});
  return out;
}

double TopRankRate(std::span<const ScoredStimulus> responses,
                   std::span<const std::string> candidates) {
  std::size_t with_top = 0;
  std::size_t hits = 0;
  for (const auto& r : responses) {
    if (!r.scores.top_token) continue;
    ++with_top;
    const std::string_view top = textio::Trim(*r.scores.top_token);
    if (std::find(candidates.begin(), candidates.end(), top) != candidates.end())
      ++hits;
  }
  if (with_top == 0) throw ValidationError("no response carries a top token");
  return static_cast<double>(hits) / static_cast<double>(with_top);
}

}  // namespace icprobe::biasmetrics

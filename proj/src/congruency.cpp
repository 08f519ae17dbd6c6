#include "icprobe/congruency.hpp"

#include <unordered_map>

#include "icprobe/error.hpp"

namespace icprobe::congruency {

using stimgen::ModeKind;
using stimgen::Referent;

std::string_view ToString(Preference p) {
  switch (p) {
    case Preference::kSubject: return "subject";
    case Preference::kObject: return "object";
    case Preference::kTie: return "tie";
  }
  return "?";
}

Preference ResolvePreference(const scorer::PronounScores& scores) {
  if (scores.p_s > scores.p_o) return Preference::kSubject;
  if (scores.p_o > scores.p_s) return Preference::kObject;
  return Preference::kTie;
}

ConditionStats CongruencyReport::overall() const {
  return {congruent.n + incongruent.n + neutral.n,
          congruent.correct + incongruent.correct + neutral.correct};
}

const ConditionStats& CongruencyReport::condition(Congruency c) const {
  switch (c) {
    case Congruency::kCongruent: return congruent;
    case Congruency::kIncongruent: return incongruent;
    case Congruency::kNeutral: return neutral;
    case Congruency::kNotApplicable: break;
  }
  throw ValidationError("no congruency condition for 'na'");
}

CongruencyReport Evaluate(std::span<const Trial> trials) {
  std::string missing;
  std::size_t n_missing = 0;
  for (const auto& t : trials) {
    const auto& s = t.stimulus;
    if (s.mode.kind != ModeKind::kExplanation || !s.mode.target)
      throw ValidationError(s.Id() + ": congruency needs explanation stimuli");
    if (s.congruency == Congruency::kNotApplicable)
      throw ValidationError(s.Id() + ": stimulus has no congruency label");
    if (!t.scores) {
      if (n_missing++ < 20) missing += (missing.empty() ? "" : ", ") + s.Id();
    }
  }
  if (n_missing > 0) {
    if (n_missing > 20) missing += ", ... (" + std::to_string(n_missing) + " total)";
    throw ValidationError("missing scores for stimuli: " + missing);
  }

  CongruencyReport report;
  std::unordered_map<std::string, std::size_t> verb_slot;
  for (const auto& t : trials) {
    const auto& s = t.stimulus;
    const Referent target = *s.mode.target;
    const Preference pref = ResolvePreference(*t.scores);
    const bool correct = (pref == Preference::kSubject && target == Referent::kSubject) ||
                         (pref == Preference::kObject && target == Referent::kObject);

    ConditionStats& cond = s.congruency == Congruency::kCongruent     ? report.congruent
                           : s.congruency == Congruency::kIncongruent ? report.incongruent
                                                                      : report.neutral;
    ++cond.n;
    cond.correct += correct;

    auto [it, fresh] = verb_slot.try_emplace(s.verb_id, report.per_verb.size());
    if (fresh) {
      VerbStats fresh_stats;
      fresh_stats.verb_id = s.verb_id;
      report.per_verb.push_back(std::move(fresh_stats));
    }
    VerbStats& vs = report.per_verb[it->second];
    ConditionStats& side = target == Referent::kSubject ? vs.subject_target : vs.object_target;
    (target == Referent::kSubject ? vs.subject_condition : vs.object_condition) = s.congruency;
    ++side.n;
    side.correct += correct;
  }
  return report;
}

CongruencyReport Evaluate(std::span<const scorer::ScoredStimulus> responses) {
  std::vector<Trial> trials;
  trials.reserve(responses.size());
  for (const auto& r : responses) trials.push_back({r.stimulus, r.scores});
  return Evaluate(trials);
}

}  // namespace icprobe::congruency

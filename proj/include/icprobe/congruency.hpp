#pragma once

// Pronoun resolution accuracy on explanation stimuli, split by whether the
// explanation agrees with the verb's IC polarity. Results pool all stimuli
// of a condition (micro average); per-verb accuracies are reported too.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "icprobe/scorer.hpp"

namespace icprobe::congruency {

using stimgen::Congruency;

enum class Preference { kSubject, kObject, kTie };

std::string_view ToString(Preference p);

Preference ResolvePreference(const scorer::PronounScores& scores);

struct ConditionStats {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
};

struct VerbStats {
  std::string verb_id;
  Congruency subject_condition = Congruency::kNotApplicable;  // label of the subject ending
  Congruency object_condition = Congruency::kNotApplicable;
  ConditionStats subject_target;
  ConditionStats object_target;

  ConditionStats total() const {
    return {subject_target.n + object_target.n, subject_target.correct + object_target.correct};
  }
};

struct CongruencyReport {
  ConditionStats congruent;
  ConditionStats incongruent;
  ConditionStats neutral;
  std::vector<VerbStats> per_verb;  // first-appearance order

  ConditionStats overall() const;
  const ConditionStats& condition(Congruency c) const;
};

/// One entry per explanation stimulus; `scores` may be absent, which is an
/// error reported with every missing stimulus id.
struct Trial {
  stimgen::StimulusVariant stimulus;
  std::optional<scorer::PronounScores> scores;
};

/// A stimulus is correct when the preferred referent equals the explanation
/// target; ties are incorrect.
CongruencyReport Evaluate(std::span<const Trial> trials);
CongruencyReport Evaluate(std::span<const scorer::ScoredStimulus> responses);

}  // namespace icprobe::congruency

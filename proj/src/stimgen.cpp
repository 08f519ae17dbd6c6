#include "icprobe/stimgen.hpp"

#include <span>

#include "icprobe/error.hpp"
#include "icprobe/hashing.hpp"

namespace icprobe::stimgen {

std::string_view ToString(ModeKind kind) {
  switch (kind) {
    case ModeKind::kClozeNonce: return "cloze_nonce";
    case ModeKind::kOpenEnded: return "open_ended";
    case ModeKind::kSwappedCloze: return "swapped_cloze";
    case ModeKind::kExplanation: return "explanation";
  }
  return "?";
}

std::string_view ToString(Referent r) { return r == Referent::kSubject ? "subject" : "object"; }

std::string_view ToString(Congruency c) {
  switch (c) {
    case Congruency::kCongruent: return "congruent";
    case Congruency::kIncongruent: return "incongruent";
    case Congruency::kNeutral: return "neutral";
    case Congruency::kNotApplicable: return "na";
  }
  return "?";
}

ModeKind ParseModeKind(std::string_view name) {
  if (name == "cloze_nonce" || name == "cloze") return ModeKind::kClozeNonce;
  if (name == "open_ended" || name == "open") return ModeKind::kOpenEnded;
  if (name == "swapped_cloze" || name == "swapped") return ModeKind::kSwappedCloze;
  if (name == "explanation") return ModeKind::kExplanation;
  throw ValidationError("unknown mode '" + std::string(name) + "'");
}

Referent ParseReferent(std::string_view name) {
  if (name == "subject") return Referent::kSubject;
  if (name == "object") return Referent::kObject;
  throw ValidationError("unknown referent '" + std::string(name) + "'");
}

Congruency ParseCongruency(std::string_view name) {
  for (auto c : {Congruency::kCongruent, Congruency::kIncongruent, Congruency::kNeutral,
                 Congruency::kNotApplicable}) {
    if (ToString(c) == name) return c;
  }
  throw ValidationError("unknown congruency '" + std::string(name) + "'");
}

std::string ModeTag(const Mode& mode) {
  std::string tag(ToString(mode.kind));
  if (mode.target) tag += "_" + std::string(ToString(*mode.target));
  return tag;
}

std::string StimulusVariant::Id() const {
  return verb_id + "/" + ModeTag(mode) + "/" + std::to_string(variant_index);
}

std::vector<NamePair> EnumerateNamePairs(const lexicon::NamePool& pool) {
  std::vector<NamePair> pairs;
  pairs.reserve(kVariantsPerVerb);
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    for (const auto& subj : pool.names(g)) {
      for (const auto& obj : pool.names(lexicon::OtherGender(g))) {
        pairs.push_back({subj, obj, g});
      }
    }
  }
  return pairs;
}

std::vector<std::string> AssignNonce(const lexicon::NonceLexicon& lexicon, std::uint64_t seed) {
  if (lexicon.words.size() < kVariantsPerVerb)
    throw ValidationError("nonce lexicon has " + std::to_string(lexicon.words.size()) +
                          " words; at least " + std::to_string(kVariantsPerVerb) +
                          " are required");
  std::vector<std::string> words(lexicon.words.begin(),
                                 lexicon.words.begin() + kVariantsPerVerb);
  SplitMix64 rng(seed);
  FisherYatesShuffle(std::span<std::string>(words), rng);
  return words;
}

std::uint64_t VerbSeed(std::uint64_t seed, std::string_view verb_id) {
  return seed ^ Fnv1a64(verb_id);
}

Congruency LabelCongruency(const lexicon::VerbEntry& verb, Referent target,
                           double strong_threshold) {
  if (verb.human_bias > strong_threshold)
    return target == Referent::kSubject ? Congruency::kCongruent : Congruency::kIncongruent;
  if (verb.human_bias < -strong_threshold)
    return target == Referent::kObject ? Congruency::kCongruent : Congruency::kIncongruent;
  return Congruency::kNeutral;
}

std::string FillBlank(std::string_view text, std::string_view filler) {
  std::string out(text);
  auto pos = out.find(kBlank);
  if (pos == std::string::npos)
    throw ValidationError("stimulus '" + std::string(text) + "' has no blank");
  out.replace(pos, kBlank.size(), filler);
  return out;
}

std::vector<StimulusVariant> Generate(const lexicon::VerbEntry& verb, const Mode& mode,
                                      const lexicon::NamePool& pool,
                                      const lexicon::NonceLexicon& nonce, std::uint64_t seed,
                                      const lexicon::ExplanationPair* explanation,
                                      double strong_threshold) {
  if (mode.kind == ModeKind::kExplanation) {
    if (!mode.target) throw ValidationError("explanation mode needs a referent target");
    if (explanation == nullptr)
      throw ValidationError("no explanation pair for verb '" + verb.id + "'");
    if (explanation->verb_id != verb.id)
      throw ValidationError("explanation pair for '" + explanation->verb_id +
                            "' given for verb '" + verb.id + "'");
  } else if (mode.target) {
    throw ValidationError("only explanation mode carries a referent target");
  }

  std::vector<std::string> nonce_words;
  if (mode.UsesNonce()) nonce_words = AssignNonce(nonce, VerbSeed(seed, verb.id));

  const auto pairs = EnumerateNamePairs(pool);
  std::vector<StimulusVariant> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    StimulusVariant v;
    v.verb_id = verb.id;
    v.variant_index = i;
    v.subject_name = pairs[i].subject;
    v.object_name = pairs[i].object;
    v.subject_gender = pairs[i].subject_gender;
    v.mode = mode;
    const std::string clause = lexicon::RenderFrame(verb, v.subject_name, v.object_name);
    const std::string blank(kBlank);
    switch (mode.kind) {
      case ModeKind::kClozeNonce:
        v.nonce_word = nonce_words[i];
        v.text = clause + " because " + blank + " was a " + *v.nonce_word + " .";
        break;
      case ModeKind::kOpenEnded:
        v.text = clause + " because";
        break;
      case ModeKind::kSwappedCloze:
        v.nonce_word = nonce_words[i];
        v.text = "Because " + blank + " was a " + *v.nonce_word + " , " + clause + " .";
        break;
      case ModeKind::kExplanation: {
        const std::string& tail = *mode.target == Referent::kSubject ? explanation->subj_expl
                                                                     : explanation->obj_expl;
        v.text = clause + " because " + blank + " " + tail + " .";
        v.congruency = LabelCongruency(verb, *mode.target, strong_threshold);
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace icprobe::stimgen

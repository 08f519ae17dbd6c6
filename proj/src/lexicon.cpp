#include "icprobe/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "icprobe/error.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::lexicon {

namespace {

using textio::Trim;

const std::set<std::string, std::less<>>& Pronouns() {
  static const std::set<std::string, std::less<>> kPronouns = {
      "he", "she", "him", "her", "his", "hers", "they", "them", "their",
      "it", "its", "i", "me", "you", "we", "us"};
  return kPronouns;
}

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

bool IsLowerAlpha(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(),
                                      [](char c) { return c >= 'a' && c <= 'z'; });
}

// Rethrow a bare validation error with its file location attached.
template <typename Fn>
void AtLocation(const std::string& source, std::size_t line, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    if (!e.file().empty()) throw;
    throw ValidationError(source, line, e.field(), e.what());
  }
}

[[noreturn]] void Fail(std::string field, const std::string& message) {
  throw ValidationError("", 0, std::move(field), message);
}

std::string StripFinalPeriod(std::string_view s) {
  s = Trim(s);
  while (!s.empty() && s.back() == '.') {
    s.remove_suffix(1);
    s = Trim(s);
  }
  return std::string(s);
}

void ValidateName(std::string_view name) {
  if (name.empty()) Fail("name", "name must not be empty");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' || c == '}')
      Fail("name", "name '" + std::string(name) + "' must be a single word");
  }
}

}  // namespace

std::string_view ToString(Gender g) { return g == Gender::kMale ? "male" : "female"; }

Gender OtherGender(Gender g) { return g == Gender::kMale ? Gender::kFemale : Gender::kMale; }

void Validate(const VerbEntry& verb) {
  if (verb.id.empty()) Fail("id", "verb id must not be empty");
  if (verb.lemma.empty()) Fail("lemma", "lemma must not be empty");
  if (!std::isfinite(verb.human_bias) || verb.human_bias < -100.0 || verb.human_bias > 100.0)
    Fail("human_bias", "human_bias must lie in [-100, 100], got " +
                           textio::FormatDouble(verb.human_bias));
  if (verb.language.empty()) Fail("language", "language tag must not be empty");
  if (CountOccurrences(verb.frame_past, kSubjectSlot) != 1)
    Fail("frame_past", "frame must contain {SUBJ} exactly once");
  if (CountOccurrences(verb.frame_past, kObjectSlot) != 1)
    Fail("frame_past", "frame must contain {OBJ} exactly once");
  auto words = textio::SplitWhitespace(verb.frame_past);
  auto subj = std::find(words.begin(), words.end(), kSubjectSlot);
  auto obj = std::find(words.begin(), words.end(), kObjectSlot);
  if (subj == words.end() || obj == words.end())
    Fail("frame_past", "{SUBJ} and {OBJ} must be standalone words");
  if (subj > obj) Fail("frame_past", "{SUBJ} must precede {OBJ}");
  if (subj + 1 == obj) Fail("frame_past", "frame has no verb between {SUBJ} and {OBJ}");
}

void Validate(const NamePool& pool) {
  std::set<std::string> seen;
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    std::set<std::string> own;
    for (const auto& name : pool.names(g)) {
      ValidateName(name);
      if (!own.insert(name).second)
        Fail("name", "duplicate " + std::string(ToString(g)) + " name '" + name + "'");
      if (!seen.insert(name).second)
        Fail("name", "name '" + name + "' appears in both pools");
    }
  }
}

void Validate(const NonceLexicon& lexicon) {
  std::set<std::string_view> seen;
  for (const auto& w : lexicon.words) {
    if (!IsLowerAlpha(w)) Fail("word", "nonce word '" + w + "' must be lowercase alphabetic");
    if (!seen.insert(w).second) Fail("word", "duplicate nonce word '" + w + "'");
  }
}

void Validate(const ExplanationPair& pair) {
  if (pair.verb_id.empty()) Fail("verb_id", "verb_id must not be empty");
  for (auto [field, text] : {std::pair{"subj_expl", &pair.subj_expl},
                             std::pair{"obj_expl", &pair.obj_expl}}) {
    auto words = textio::SplitWhitespace(*text);
    if (words.empty()) Fail(field, "explanation must not be empty");
    const std::string first = textio::ToLower(words.front());
    if (first == textio::ToLower(kSubjectSlot) || first == textio::ToLower(kObjectSlot) ||
        Pronouns().count(first))
      Fail(field, "explanation must start with a verb, not '" + words.front() + "'");
  }
}

std::size_t VerbWordIndex(const VerbEntry& verb) {
  auto words = textio::SplitWhitespace(verb.frame_past);
  auto it = std::find(words.begin(), words.end(), kSubjectSlot);
  if (it == words.end()) throw ValidationError("frame '" + verb.frame_past + "' has no {SUBJ}");
  return static_cast<std::size_t>(it - words.begin()) + 1;
}

std::string RenderFrame(const VerbEntry& verb, std::string_view subject,
                        std::string_view object) {
  std::string out = verb.frame_past;
  out.replace(out.find(kSubjectSlot), kSubjectSlot.size(), subject);
  out.replace(out.find(kObjectSlot), kObjectSlot.size(), object);
  return out;
}

std::vector<VerbEntry> ParseVerbs(std::string_view text, const std::string& source) {
  static const std::vector<std::string> kHeader = {"id", "lemma", "frame_past",
                                                   "human_bias", "language"};
  auto lines = textio::SplitLines(text);
  std::vector<VerbEntry> verbs;
  std::set<std::string> ids;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Trim(lines[i]).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = textio::ParseCsvLine(lines[i]);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(source, lineno, "", std::string("malformed row: ") + e.what());
    }
    for (auto& f : fields) f = std::string(Trim(f));
    if (!have_header) {
      if (fields != kHeader)
        throw ValidationError(source, lineno, "",
                              "expected header id,lemma,frame_past,human_bias,language");
      have_header = true;
      continue;
    }
    if (fields.size() != kHeader.size())
      throw ValidationError(source, lineno, "",
                            "malformed row: expected 5 fields, got " +
                                std::to_string(fields.size()));
    VerbEntry v;
    v.id = fields[0];
    v.lemma = fields[1];
    v.frame_past = fields[2];
    v.language = textio::ToLower(fields[4]);
    const std::string& b = fields[3];
    auto [ptr, ec] = std::from_chars(b.data(), b.data() + b.size(), v.human_bias);
    if (ec != std::errc() || ptr != b.data() + b.size())
      throw ValidationError(source, lineno, "human_bias", "not a number: '" + b + "'");
    AtLocation(source, lineno, [&] { Validate(v); });
    if (!ids.insert(v.id).second)
      throw ValidationError(source, lineno, "id", "duplicate verb id '" + v.id + "'");
    verbs.push_back(std::move(v));
  }
  if (!have_header) throw ValidationError(source, 0, "", "missing header row");
  return verbs;
}

NamePool ParseNames(std::string_view text, const std::string& source) {
  auto lines = textio::SplitLines(text);
  std::vector<std::string> male, female;
  std::map<std::string, std::size_t> first_line;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Trim(lines[i]).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = textio::ParseCsvLine(lines[i]);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(source, lineno, "", std::string("malformed row: ") + e.what());
    }
    for (auto& f : fields) f = std::string(Trim(f));
    if (!have_header) {
      if (fields != std::vector<std::string>{"gender", "name"})
        throw ValidationError(source, lineno, "", "expected header gender,name");
      have_header = true;
      continue;
    }
    if (fields.size() != 2)
      throw ValidationError(source, lineno, "", "malformed row: expected 2 fields");
    const std::string g = textio::ToLower(fields[0]);
    AtLocation(source, lineno, [&] { ValidateName(fields[1]); });
    if (auto [it, fresh] = first_line.emplace(fields[1], lineno); !fresh)
      throw ValidationError(source, lineno, "name",
                            "duplicate name '" + fields[1] + "' (first on line " +
                                std::to_string(it->second) + ")");
    if (g == "male" || g == "m") {
      male.push_back(fields[1]);
    } else if (g == "female" || g == "f") {
      female.push_back(fields[1]);
    } else {
      throw ValidationError(source, lineno, "gender", "unknown gender '" + fields[0] + "'");
    }
  }
  if (!have_header) throw ValidationError(source, 0, "", "missing header row");
  if (male.size() != kPoolSize)
    throw ValidationError(source, 0, "gender",
                          "pool size must be 10 (male pool has " +
                              std::to_string(male.size()) + ")");
  if (female.size() != kPoolSize)
    throw ValidationError(source, 0, "gender",
                          "pool size must be 10 (female pool has " +
                              std::to_string(female.size()) + ")");
  NamePool pool;
  std::copy(male.begin(), male.end(), pool.male.begin());
  std::copy(female.begin(), female.end(), pool.female.begin());
  return pool;
}

NonceLexicon ParseNonce(std::string_view text, const std::string& source) {
  NonceLexicon lex;
  std::map<std::string, std::size_t> first_line;
  auto lines = textio::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string word(Trim(lines[i]));
    if (word.empty()) continue;
    if (!IsLowerAlpha(word))
      throw ValidationError(source, lineno, "word",
                            "nonce word '" + word + "' must be lowercase alphabetic");
    if (auto [it, fresh] = first_line.emplace(word, lineno); !fresh)
      throw ValidationError(source, lineno, "word",
                            "duplicate nonce word '" + word + "' (first on line " +
                                std::to_string(it->second) + ")");
    lex.words.push_back(std::move(word));
  }
  return lex;
}

std::vector<ExplanationPair> ParseExplanations(std::string_view text,
                                               const std::string& source) {
  std::vector<ExplanationPair> pairs;
  std::set<std::string> ids;
  auto lines = textio::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Trim(lines[i]).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(source, lineno, "", std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ValidationError(source, lineno, "", "expected a JSON object");
    ExplanationPair p;
    for (auto [key, dst] : {std::pair{"verb_id", &p.verb_id},
                            std::pair{"subj_expl", &p.subj_expl},
                            std::pair{"obj_expl", &p.obj_expl}}) {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_string())
        throw ValidationError(source, lineno, key, "missing or non-string field");
      *dst = it->get<std::string>();
    }
    p.verb_id = std::string(Trim(p.verb_id));
    p.subj_expl = StripFinalPeriod(p.subj_expl);
    p.obj_expl = StripFinalPeriod(p.obj_expl);
    AtLocation(source, lineno, [&] { Validate(p); });
    if (!ids.insert(p.verb_id).second)
      throw ValidationError(source, lineno, "verb_id",
                            "duplicate explanation pair for '" + p.verb_id + "'");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<VerbEntry> LoadVerbs(const std::filesystem::path& path) {
  return ParseVerbs(textio::ReadFile(path), path.string());
}

NamePool LoadNames(const std::filesystem::path& path) {
  return ParseNames(textio::ReadFile(path), path.string());
}

NonceLexicon LoadNonce(const std::filesystem::path& path) {
  return ParseNonce(textio::ReadFile(path), path.string());
}

std::vector<ExplanationPair> LoadExplanations(const std::filesystem::path& path) {
  return ParseExplanations(textio::ReadFile(path), path.string());
}

std::string SerializeVerbs(std::span<const VerbEntry> verbs) {
  std::string out = "id,lemma,frame_past,human_bias,language\n";
  for (const auto& v : verbs) {
    out += textio::CsvJoin({v.id, v.lemma, v.frame_past, textio::FormatDouble(v.human_bias),
                            v.language});
    out += '\n';
  }
  return out;
}

std::string SerializeNames(const NamePool& pool) {
  std::string out = "gender,name\n";
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    for (const auto& n : pool.names(g)) {
      out += std::string(ToString(g)) + "," + n + "\n";
    }
  }
  return out;
}

std::string SerializeNonce(const NonceLexicon& lexicon) {
  std::string out;
  for (const auto& w : lexicon.words) out += w + "\n";
  return out;
}

std::string SerializeExplanations(std::span<const ExplanationPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::json obj = {{"verb_id", p.verb_id},
                          {"subj_expl", p.subj_expl},
                          {"obj_expl", p.obj_expl}};
    out += obj.dump() + "\n";
  }
  return out;
}

const ExplanationPair* FindExplanation(std::span<const ExplanationPair> pairs,
                                       std::string_view verb_id) {
  auto it = std::find_if(pairs.begin(), pairs.end(),
                         [&](const ExplanationPair& p) { return p.verb_id == verb_id; });
  return it == pairs.end() ? nullptr : &*it;
}

}  // namespace icprobe::lexicon

#include "icprobe/records.hpp"

#include <charconv>
#include <cmath>

#include "icprobe/error.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::records {

using nlohmann::json;
using stimgen::StimulusVariant;

namespace {

lexicon::Gender ParseGender(const std::string& s) {
  if (s == "male") return lexicon::Gender::kMale;
  if (s == "female") return lexicon::Gender::kFemale;
  throw ValidationError("unknown gender '" + s + "'");
}

// Parse every non-blank line of a JSONL file with `fn(json)`, attaching the
// location to any error it raises.
template <typename Fn>
void ForEachRecord(const std::filesystem::path& path, Fn&& fn) {
  const auto lines = textio::SplitLines(textio::ReadFile(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (textio::Trim(lines[i]).empty()) continue;
    try {
      fn(json::parse(lines[i]));
    } catch (const json::exception& e) {
      throw ValidationError(path.string(), i + 1, "", std::string("malformed record: ") + e.what());
    } catch (const ValidationError& e) {
      if (!e.file().empty()) throw;
      throw ValidationError(path.string(), i + 1, e.field(), e.what());
    }
  }
}

json OptionalString(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> ReadOptionalString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<double> ParseOptionalNumber(const std::string& s, const std::string& source,
                                          std::size_t line, const char* field) {
  if (s == "NA" || s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError(source, line, field, "not a number: '" + s + "'");
  return v;
}

std::size_t ParseCount(const std::string& s, const std::string& source, std::size_t line,
                       const char* field) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError(source, line, field, "not a count: '" + s + "'");
  return v;
}

}  // namespace

json StimulusToJson(const StimulusVariant& v) {
  return json{
      {"id", v.Id()},
      {"verb_id", v.verb_id},
      {"variant_index", v.variant_index},
      {"subject_name", v.subject_name},
      {"object_name", v.object_name},
      {"subject_gender", std::string(lexicon::ToString(v.subject_gender))},
      {"nonce_word", OptionalString(v.nonce_word)},
      {"mode", std::string(stimgen::ToString(v.mode.kind))},
      {"target", v.mode.target ? json(std::string(stimgen::ToString(*v.mode.target))) : json(nullptr)},
      {"text", v.text},
      {"congruency", std::string(stimgen::ToString(v.congruency))},
  };
}

StimulusVariant StimulusFromJson(const json& j) {
  StimulusVariant v;
  v.verb_id = j.at("verb_id").get<std::string>();
  v.variant_index = j.at("variant_index").get<std::size_t>();
  v.subject_name = j.at("subject_name").get<std::string>();
  v.object_name = j.at("object_name").get<std::string>();
  v.subject_gender = ParseGender(j.at("subject_gender").get<std::string>());
  v.nonce_word = ReadOptionalString(j, "nonce_word");
  v.mode.kind = stimgen::ParseModeKind(j.at("mode").get<std::string>());
  if (auto t = ReadOptionalString(j, "target")) v.mode.target = stimgen::ParseReferent(*t);
  v.text = j.at("text").get<std::string>();
  v.congruency = stimgen::ParseCongruency(j.at("congruency").get<std::string>());
  if ((v.mode.kind == stimgen::ModeKind::kExplanation) != v.mode.target.has_value())
    throw ValidationError("", 0, "target", "target must be set exactly for explanation stimuli");
  if (v.mode.UsesNonce() != v.nonce_word.has_value())
    throw ValidationError("", 0, "nonce_word", "nonce_word must be set exactly in nonce modes");
  if (auto id = j.find("id"); id != j.end() && id->get<std::string>() != v.Id())
    throw ValidationError("", 0, "id", "id '" + id->get<std::string>() + "' does not match fields");
  return v;
}

std::string FormatStimuli(std::span<const StimulusVariant> stimuli, std::uint64_t seed,
                          const std::string& manifest_hash) {
  std::string out;
  for (const auto& v : stimuli) {
    json j = StimulusToJson(v);
    j["seed"] = seed;
    j["manifest_hash"] = manifest_hash;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<StimulusVariant> ReadStimuli(const std::filesystem::path& path) {
  std::vector<StimulusVariant> out;
  ForEachRecord(path, [&](const json& j) { out.push_back(StimulusFromJson(j)); });
  return out;
}

std::string FormatResponses(std::span<const scorer::ScoredStimulus> responses,
                            const std::string& backend_id, const std::string& manifest_hash) {
  std::string out;
  for (const auto& r : responses) {
    json j = StimulusToJson(r.stimulus);
    j["backend_id"] = backend_id;
    j["method"] = r.scores.method;
    j["scores"] = r.scores.by_pronoun;
    j["p_s"] = r.scores.p_s;
    j["p_o"] = r.scores.p_o;
    j["top_token"] = OptionalString(r.scores.top_token);
    j["manifest_hash"] = manifest_hash;
    out += j.dump() + "\n";
  }
  return out;
}

ResponseSet ReadResponses(const std::filesystem::path& path) {
  ResponseSet set;
  bool first = true;
  ForEachRecord(path, [&](const json& j) {
    scorer::ScoredStimulus r;
    r.stimulus = StimulusFromJson(j);
    r.scores.method = j.at("method").get<std::string>();
    r.scores.by_pronoun = j.at("scores").get<std::map<std::string, double>>();
    r.scores.p_s = j.at("p_s").get<double>();
    r.scores.p_o = j.at("p_o").get<double>();
    r.scores.top_token = ReadOptionalString(j, "top_token");
    const std::string backend = j.at("backend_id").get<std::string>();
    if (first) {
      set.backend_id = backend;
      first = false;
    } else if (backend != set.backend_id) {
      throw ValidationError("", 0, "backend_id", "responses mix backends '" + set.backend_id +
                                                     "' and '" + backend + "'");
    }
    set.responses.push_back(std::move(r));
  });
  return set;
}

std::string FormatEmbeddings(std::span<const repprobe::VerbEmbedding> embeddings,
                             const std::string& manifest_hash) {
  std::string out;
  for (const auto& e : embeddings) {
    json j{{"verb_id", e.verb_id},
           {"dim", e.dim()},
           {"vector", e.vector},
           {"manifest_hash", manifest_hash}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<repprobe::VerbEmbedding> ReadEmbeddings(const std::filesystem::path& path) {
  std::vector<repprobe::VerbEmbedding> out;
  ForEachRecord(path, [&](const json& j) {
    repprobe::VerbEmbedding e{j.at("verb_id").get<std::string>(),
                              j.at("vector").get<std::vector<double>>()};
    if (j.at("dim").get<std::size_t>() != e.dim())
      throw ValidationError("", 0, "dim", "dim does not match vector length");
    if (!out.empty() && out.front().dim() != e.dim())
      throw ValidationError("", 0, "dim", "all embeddings of a run must share one dimension");
    out.push_back(std::move(e));
  });
  return out;
}

std::string FormatBiasResults(std::span<const BiasRow> rows, const std::string& manifest_hash) {
  std::string out = "# manifest_hash=" + manifest_hash + "\n";
  out += "verb_id,lemma,s_wins,o_wins,ties,bias,polarity,human_bias\n";
  for (const auto& r : rows) {
    out += textio::CsvJoin({r.verb_id, r.lemma, std::to_string(r.tally.s_wins),
                            std::to_string(r.tally.o_wins), std::to_string(r.tally.ties),
                            r.bias ? textio::FormatDouble(*r.bias) : "NA",
                            std::string(biasmetrics::ToString(r.polarity)),
                            r.human_bias ? textio::FormatDouble(*r.human_bias) : "NA"});
    out += "\n";
  }
  return out;
}

std::vector<BiasRow> ParseBiasResults(std::string_view text, const std::string& source) {
  std::vector<BiasRow> rows;
  bool header = false;
  const auto lines = textio::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto trimmed = textio::Trim(lines[i]);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto f = textio::ParseCsvLine(lines[i]);
    if (!header) {
      header = true;
      continue;
    }
    if (f.size() != 8) throw ValidationError(source, lineno, "", "expected 8 fields");
    BiasRow r;
    r.verb_id = f[0];
    r.lemma = f[1];
    r.tally = {ParseCount(f[2], source, lineno, "s_wins"), ParseCount(f[3], source, lineno, "o_wins"),
               ParseCount(f[4], source, lineno, "ties")};
    r.bias = ParseOptionalNumber(f[5], source, lineno, "bias");
    r.polarity = biasmetrics::ParsePolarity(f[6]);
    r.human_bias = ParseOptionalNumber(f[7], source, lineno, "human_bias");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace icprobe::records

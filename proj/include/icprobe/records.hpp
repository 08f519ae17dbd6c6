#pragma once

// On-disk stage artifacts: stimuli.jsonl, responses.jsonl, embeddings.jsonl
// and bias_results.csv. Every writer stamps the producing run's manifest
// hash; readers report malformed records by file and line.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "icprobe/biasmetrics.hpp"
#include "icprobe/lexicon.hpp"
#include "icprobe/repprobe.hpp"
#include "icprobe/scorer.hpp"
#include "icprobe/stimgen.hpp"

namespace icprobe::records {

nlohmann::json StimulusToJson(const stimgen::StimulusVariant& v);
stimgen::StimulusVariant StimulusFromJson(const nlohmann::json& j);

std::string FormatStimuli(std::span<const stimgen::StimulusVariant> stimuli, std::uint64_t seed,
                          const std::string& manifest_hash);
std::vector<stimgen::StimulusVariant> ReadStimuli(const std::filesystem::path& path);

struct ResponseSet {
  std::string backend_id;
  std::vector<scorer::ScoredStimulus> responses;
};

std::string FormatResponses(std::span<const scorer::ScoredStimulus> responses,
                            const std::string& backend_id, const std::string& manifest_hash);
ResponseSet ReadResponses(const std::filesystem::path& path);

std::string FormatEmbeddings(std::span<const repprobe::VerbEmbedding> embeddings,
                             const std::string& manifest_hash);
std::vector<repprobe::VerbEmbedding> ReadEmbeddings(const std::filesystem::path& path);

struct BiasRow {
  std::string verb_id;
  std::string lemma;
  biasmetrics::Tally tally;
  std::optional<double> bias;  // written as "NA" when undefined
  biasmetrics::Polarity polarity = biasmetrics::Polarity::kZero;
  std::optional<double> human_bias;
};

// Leading "# manifest_hash=<hex>" comment, then the header
// verb_id,lemma,s_wins,o_wins,ties,bias,polarity,human_bias.
std::string FormatBiasResults(std::span<const BiasRow> rows, const std::string& manifest_hash);
std::vector<BiasRow> ParseBiasResults(std::string_view text, const std::string& source);

}  // namespace icprobe::records

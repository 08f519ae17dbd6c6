#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "icprobe/congruency.hpp"
#include "icprobe/records.hpp"
#include "icprobe/repprobe.hpp"

namespace icprobe::report {

nlohmann::json ToJson(const congruency::CongruencyReport& report);
nlohmann::json ToJson(const repprobe::ProbeReport& report, const repprobe::ProbeConfig& config);

struct PolarityCounts {
  std::size_t subject = 0;
  std::size_t object = 0;
  std::size_t zero = 0;

  std::size_t total() const { return subject + object + zero; }
  double subject_ratio() const;
  double object_ratio() const;
};

PolarityCounts CountModelPolarity(std::span<const records::BiasRow> rows);
// Verbs without a human norm are skipped.
PolarityCounts CountHumanPolarity(std::span<const records::BiasRow> rows);

struct SummaryInputs {
  std::optional<std::vector<records::BiasRow>> bias_rows;
  std::optional<nlohmann::json> correlation;
  std::optional<nlohmann::json> congruency;
  std::optional<nlohmann::json> probe;
};

std::string RenderSummary(const SummaryInputs& inputs);

// Horizontal stacked bars of S-bias / O-bias shares, one bar per source.
std::string RenderRatioSvg(const PolarityCounts& model, const PolarityCounts& human,
                           const std::string& model_label);

}  // namespace icprobe::report

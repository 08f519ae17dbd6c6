#include "icprobe/report.hpp"

#include <cstdio>
#include <sstream>

namespace icprobe::report {

using nlohmann::json;

namespace {

json Condition(const congruency::ConditionStats& c) {
  return {{"n", c.n}, {"correct", c.correct}, {"accuracy", c.accuracy()}};
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string NumberOr(const json& j, const char* key, int digits, const char* fallback = "n/a") {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return fallback;
  return Fixed(it->get<double>(), digits);
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

json ToJson(const congruency::CongruencyReport& report) {
  json per_verb = json::array();
  for (const auto& v : report.per_verb) {
    per_verb.push_back({{"verb_id", v.verb_id},
                        {"subject_target", Condition(v.subject_target)},
                        {"object_target", Condition(v.object_target)},
                        {"subject_condition", std::string(stimgen::ToString(v.subject_condition))},
                        {"object_condition", std::string(stimgen::ToString(v.object_condition))},
                        {"accuracy", v.total().accuracy()}});
  }
  return {{"congruent", Condition(report.congruent)},
          {"incongruent", Condition(report.incongruent)},
          {"neutral", Condition(report.neutral)},
          {"overall", Condition(report.overall())},
          {"aggregation", "micro"},
          {"per_verb", per_verb}};
}

json ToJson(const repprobe::ProbeReport& report, const repprobe::ProbeConfig& config) {
  json per_repeat = json::array();
  for (const auto& r : report.per_repeat) {
    per_repeat.push_back({{"lr_rho", r.lr_rho},
                          {"lda_rho", r.lda_rho},
                          {"components", r.components},
                          {"resamples", r.resamples},
                          {"lr_regularized", r.lr_regularized}});
  }
  return {{"lr_mean_rho", report.lr_mean_rho},
          {"lda_mean_rho", report.lda_mean_rho},
          {"total_resamples", report.total_resamples},
          {"config",
           {{"pca_fraction", config.pca_fraction},
            {"n_repeats", config.n_repeats},
            {"split_fraction", config.split_fraction},
            {"lda_ridge", config.lda_ridge},
            {"seed", config.seed}}},
          {"per_repeat", per_repeat}};
}

double PolarityCounts::subject_ratio() const {
  return total() ? static_cast<double>(subject) / static_cast<double>(total()) : 0.0;
}

double PolarityCounts::object_ratio() const {
  return total() ? static_cast<double>(object) / static_cast<double>(total()) : 0.0;
}

PolarityCounts CountModelPolarity(std::span<const records::BiasRow> rows) {
  PolarityCounts c;
  for (const auto& r : rows) {
    switch (r.polarity) {
      case biasmetrics::Polarity::kSubject: ++c.subject; break;
      case biasmetrics::Polarity::kObject: ++c.object; break;
      case biasmetrics::Polarity::kZero: ++c.zero; break;
    }
  }
  return c;
}

PolarityCounts CountHumanPolarity(std::span<const records::BiasRow> rows) {
  PolarityCounts c;
  for (const auto& r : rows) {
    if (!r.human_bias) continue;
    switch (biasmetrics::PolarityOf(*r.human_bias)) {
      case biasmetrics::Polarity::kSubject: ++c.subject; break;
      case biasmetrics::Polarity::kObject: ++c.object; break;
      case biasmetrics::Polarity::kZero: ++c.zero; break;
    }
  }
  return c;
}

std::string RenderSummary(const SummaryInputs& in) {
  std::ostringstream out;
  out << "IC probe summary\n================\n";
  if (in.bias_rows) {
    const auto model = CountModelPolarity(*in.bias_rows);
    const auto human = CountHumanPolarity(*in.bias_rows);
    out << "\nVerb polarity (" << in.bias_rows->size() << " verbs)\n";
    out << "  source   S-bias   O-bias   zero/undef   S ratio   O ratio\n";
    auto line = [&](const char* name, const PolarityCounts& c) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "  %-7s %7zu %8zu %12zu %9s %9s\n", name, c.subject, c.object,
                    c.zero, Fixed(c.subject_ratio(), 3).c_str(), Fixed(c.object_ratio(), 3).c_str());
      out << buf;
    };
    line("model", model);
    line("human", human);
  }
  if (in.correlation) {
    const auto& c = *in.correlation;
    out << "\nCorrelation with human bias"
        << (c.value("discounted", false) ? " (discounted)" : "") << "\n";
    out << "  Spearman rho  " << NumberOr(c, "rho", 2) << "  (n=" << c.value("n", 0) << ", p="
        << NumberOr(c, "p_value", 4) << ", permutation test"
        << (c.value("significant", false) ? ", significant at p<0.001" : "") << ")\n";
    out << "  polarity F1   " << NumberOr(c, "f1", 3) << "  (n=" << c.value("n_f1", 0) << ")\n";
    if (c.contains("top_rank_rate") && c["top_rank_rate"].is_number())
      out << "  top-1 he/she  " << NumberOr(c, "top_rank_rate", 3) << "\n";
  }
  if (in.congruency) {
    const auto& c = *in.congruency;
    out << "\nPronoun resolution accuracy (chance = 0.5)\n";
    for (const char* cond : {"congruent", "incongruent", "neutral", "overall"}) {
      if (!c.contains(cond)) continue;
      char buf[128];
      std::snprintf(buf, sizeof(buf), "  %-12s %s  (%lld/%lld)\n", cond,
                    NumberOr(c[cond], "accuracy", 3).c_str(), c[cond].value("correct", 0LL),
                    c[cond].value("n", 0LL));
      out << buf;
    }
  }
  if (in.probe) {
    const auto& p = *in.probe;
    out << "\nRepresentation probes (mean held-out Spearman rho over "
        << p["config"].value("n_repeats", 0) << " splits)\n";
    out << "  LR   " << NumberOr(p, "lr_mean_rho", 2) << "\n";
    out << "  LDA  " << NumberOr(p, "lda_mean_rho", 2) << "\n";
  }
  if (!in.bias_rows && !in.correlation && !in.congruency && !in.probe)
    out << "\n(no stage outputs found)\n";
  return out.str();
}

std::string RenderRatioSvg(const PolarityCounts& model, const PolarityCounts& human,
                           const std::string& model_label) {
  constexpr int kWidth = 520;
  constexpr int kBarX = 90;
  constexpr int kBarW = 400;
  constexpr int kBarH = 28;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"150\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "  <text x=\"10\" y=\"20\" font-size=\"14\">Ratio of S-bias and O-bias verbs</text>\n";
  int y = 40;
  for (const auto& [label, counts] :
       {std::pair<std::string, const PolarityCounts*>{model_label, &model},
        std::pair<std::string, const PolarityCounts*>{"human", &human}}) {
    const double s_w = kBarW * counts->subject_ratio();
    const double o_w = kBarW * counts->object_ratio();
    svg << "  <text x=\"10\" y=\"" << y + 18 << "\">" << XmlEscape(label) << "</text>\n";
    svg << "  <rect x=\"" << kBarX << "\" y=\"" << y << "\" width=\"" << Fixed(s_w, 2)
        << "\" height=\"" << kBarH << "\" fill=\"#4c72b0\"/>\n";
    svg << "  <rect x=\"" << Fixed(kBarX + s_w, 2) << "\" y=\"" << y << "\" width=\""
        << Fixed(o_w, 2) << "\" height=\"" << kBarH << "\" fill=\"#dd8452\"/>\n";
    svg << "  <text x=\"" << kBarX + 4 << "\" y=\"" << y + 18 << "\" fill=\"white\">S "
        << Fixed(counts->subject_ratio(), 2) << "</text>\n";
    svg << "  <text x=\"" << kBarX + kBarW - 50 << "\" y=\"" << y + 18 << "\" fill=\"white\">O "
        << Fixed(counts->object_ratio(), 2) << "</text>\n";
    y += kBarH + 12;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace icprobe::report

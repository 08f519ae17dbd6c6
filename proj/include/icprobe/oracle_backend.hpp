#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>

#include "icprobe/scorer.hpp"

namespace icprobe::scorer {

struct OracleOptions {
  Capabilities capabilities = Capabilities::All();
  std::size_t embed_dim = 32;
  double embed_noise = 0.01;  // amplitude of the hash noise on coordinates 1..d-1
  double he_shift = 0.0;      // constant added to every score of "he"
  std::string id = "oracle";
};

/// Deterministic backend whose per-verb tallies reproduce a target bias.
///
/// For a verb with target b the first round(b) + 100 variants (by index)
/// prefer the subject (p_s = 0.75, p_o = 0.25), the rest the object. Over
/// 200 variants this gives s_wins - o_wins = 2 round(b), i.e. bias b.
/// Embed returns b / 100 in coordinate 0 and small hash noise elsewhere.
/// Unknown verbs are unscorable.
class OracleBackend : public Backend {
 public:
  OracleBackend(std::map<std::string, double> targets, OracleOptions options = {});

  std::string id() const override { return options_.id; }
  Capabilities capabilities() override { return options_.capabilities; }
  CandidateScores Score(const StimulusVariant& variant, const ScoreMethod& method) override;
  std::vector<double> Embed(const EmbedRequest& request) override;

  // Number of leading variants that prefer the subject.
  std::size_t SubjectWinsTarget(const std::string& verb_id) const;

 private:
  double Target(const std::string& verb_id) const;

  std::map<std::string, double> targets_;
  OracleOptions options_;
};

}  // namespace icprobe::scorer

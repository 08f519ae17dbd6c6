// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "icprobe/biasmetrics.hpp"
#include "icprobe/cli.hpp"
#include "icprobe/congruency.hpp"
#include "icprobe/hashing.hpp"
#include "icprobe/lexicon.hpp"
#include "icprobe/oracle_backend.hpp"
#include "icprobe/records.hpp"
#include "icprobe/repprobe.hpp"
#include "icprobe/stats.hpp"
#include "icprobe/stimgen.hpp"
#include "icprobe/textio.hpp"
#include "support/fake_model_server.hpp"
#include "support/fixtures.hpp"

using namespace icprobe;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failed expectations for one criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    if (failed_ > failures_.size()) s += "; +" + std::to_string(failed_ - failures_.size()) + " more";
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

int Cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

const std::vector<std::string> kFrames = {
    "{SUBJ} praised {OBJ}",     "{SUBJ} apologized to {OBJ}", "{SUBJ} admired {OBJ}",
    "{SUBJ} blamed {OBJ}",      "{SUBJ} confessed to {OBJ}",  "{SUBJ} fascinated {OBJ}",
    "{SUBJ} thanked {OBJ}",     "{SUBJ} frightened {OBJ}",    "{SUBJ} envied {OBJ}",
    "{SUBJ} disappointed {OBJ}"};

// Verbs with ids s000.. and the given human norms.
std::vector<lexicon::VerbEntry> SyntheticVerbs(const std::vector<double>& bias) {
  std::vector<lexicon::VerbEntry> verbs;
  for (std::size_t i = 0; i < bias.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "s%03zu", i);
    verbs.push_back({id, "verb" + std::to_string(i), kFrames[i % kFrames.size()], bias[i], "en"});
  }
  return verbs;
}

std::vector<scorer::ScoredStimulus> Score(scorer::Backend& backend,
                                          const std::vector<stimgen::StimulusVariant>& stimuli) {
  const auto scores = scorer::ScoreAll(backend, stimuli, 4);
  std::vector<scorer::ScoredStimulus> out;
  out.reserve(stimuli.size());
  for (std::size_t i = 0; i < stimuli.size(); ++i) out.push_back({stimuli[i], scores[i]});
  return out;
}

// ---------------------------------------------------------------------------

std::string OracleRoundTrip(Checker& c) {
  const auto start = Clock::now();
  testing::TempDir dir("acc_roundtrip");
  SplitMix64 rng(2024);
  std::vector<double> targets;
  while (targets.size() < 20) {
    const double b = static_cast<double>(rng.NextBelow(201)) - 100;
    if (b != 0) targets.push_back(b);
  }
  const auto verbs = SyntheticVerbs(targets);
  textio::WriteFile(dir / "verbs.csv", lexicon::SerializeVerbs(verbs));
  std::string target_csv = "verb_id,target\n";
  for (const auto& v : verbs) target_csv += v.id + "," + textio::FormatDouble(v.human_bias) + "\n";
  textio::WriteFile(dir / "targets.csv", target_csv);

  const std::string out = (dir / "run").string();
  const std::string lex = (dir / "verbs.csv").string();
  const auto sample = testing::SampleDir();
  std::string err;
  c.Expect(Cli({"gen", "--lexicon", lex, "--names", (sample / "names.csv").string(), "--nonce",
                (sample / "nonce.txt").string(), "--seed", "11", "--out", out},
               &err) == 0,
           "gen failed: " + err);
  c.Expect(Cli({"probe", "--oracle-targets", (dir / "targets.csv").string(), "--out", out}, &err) == 0,
           "probe failed: " + err);
  c.Expect(Cli({"bias", "--lexicon", lex, "--out", out}, &err) == 0, "bias failed: " + err);
  const double elapsed = Seconds(start);

  const auto rows = records::ParseBiasResults(textio::ReadFile(dir / "run/bias_results.csv"), "bias_results.csv");
  c.Expect(rows.size() == 20, "expected 20 bias rows");
  for (std::size_t i = 0; i < rows.size() && i < verbs.size(); ++i) {
    c.Expect(rows[i].bias && *rows[i].bias == targets[i],
             rows[i].verb_id + ": bias " + (rows[i].bias ? Num(*rows[i].bias) : "NA") + " != " + Num(targets[i]));
  }
  const json corr = json::parse(textio::ReadFile(dir / "run/correlation_report.json"));
  const double rho = corr["rho"].is_number() ? corr["rho"].get<double>() : NAN;
  const double f1 = corr["f1"].is_number() ? corr["f1"].get<double>() : NAN;
  c.Expect(rho == 1.0, "rho " + Num(rho));
  c.Expect(f1 == 1.0, "F1 " + Num(f1));
  c.Expect(elapsed < 10.0, "runtime " + Num(elapsed) + " s");
  return "20 verbs, bias exact, rho=" + Num(rho) + ", F1=" + Num(f1) + ", " + Num(elapsed) + " s";
}

std::string BiasFormula(Checker& c) {
  using biasmetrics::BiasScore;
  c.Expect(BiasScore(200, 0) == 100.0, "(200,0)");
  c.Expect(BiasScore(0, 200) == -100.0, "(0,200)");
  c.Expect(BiasScore(150, 50) == 50.0, "(150,50)");
  c.Expect(std::abs(*BiasScore(100, 80) - 11.111) <= 1e-3 && std::abs(*BiasScore(100, 80) - 100.0 / 9) <= 1e-9,
           "(100,80) = " + Num(*BiasScore(100, 80)));
  SplitMix64 rng(5);
  std::size_t pairs = 0;
  while (pairs < 1000) {
    const std::size_t s = rng.NextBelow(201), o = rng.NextBelow(201);
    if (s + o == 0) continue;
    ++pairs;
    c.Expect(*BiasScore(s, o) == -*BiasScore(o, s), "antisymmetry at (" + std::to_string(s) + "," + std::to_string(o) + ")");
  }
  return "endpoints, (100,80) = " + Num(*BiasScore(100, 80)) + ", antisymmetric over 1000 pairs";
}

std::string Enumeration(Checker& c) {
  const auto sample = testing::SampleDir();
  const auto verbs = lexicon::LoadVerbs(sample / "verbs.csv");
  const auto pool = lexicon::LoadNames(sample / "names.csv");
  const auto nonce = lexicon::LoadNonce(sample / "nonce.txt");
  const auto pairs = lexicon::LoadExplanations(sample / "explanations.jsonl");
  std::size_t checked = 0;
  for (const auto& verb : verbs) {
    const auto* expl = lexicon::FindExplanation(pairs, verb.id);
    std::vector<stimgen::Mode> modes = {stimgen::Mode::ClozeNonce(), stimgen::Mode::OpenEnded(),
                                        stimgen::Mode::SwappedCloze()};
    if (expl) {
      modes.push_back(stimgen::Mode::Explanation(stimgen::Referent::kSubject));
      modes.push_back(stimgen::Mode::Explanation(stimgen::Referent::kObject));
    }
    for (const auto& mode : modes) {
      const auto vs = stimgen::Generate(verb, mode, pool, nonce, 77, expl);
      const std::string where = verb.id + "/" + stimgen::ModeTag(mode);
      c.Expect(vs.size() == 200, where + ": " + std::to_string(vs.size()) + " variants");
      std::size_t male = 0;
      std::set<std::string> words;
      for (const auto& v : vs) {
        male += v.subject_gender == lexicon::Gender::kMale;
        c.Expect(v.subject_gender != v.object_gender(), where + ": matched genders");
        if (v.nonce_word) words.insert(*v.nonce_word);
      }
      c.Expect(male == 100, where + ": " + std::to_string(male) + " male subjects");
      if (mode.UsesNonce()) c.Expect(words.size() == 200, where + ": repeated nonce words");
      ++checked;
    }
  }

  testing::TempDir dir("acc_enum");
  for (const char* mode : {"cloze", "open", "swapped", "explanation"}) {
    std::vector<std::string> hashes;
    for (const char* run : {"a", "b"}) {
      const std::string out = (dir / (std::string(mode) + run)).string();
      Cli({"gen", "--lexicon", (sample / "verbs.csv").string(), "--names", (sample / "names.csv").string(),
           "--nonce", (sample / "nonce.txt").string(), "--explanations",
           (sample / "explanations.jsonl").string(), "--mode", mode, "--seed", "77", "--out", out});
      hashes.push_back(Sha256Hex(textio::ReadFile(std::filesystem::path(out) / "stimuli.jsonl")));
    }
    c.Expect(hashes[0] == hashes[1], std::string(mode) + ": regenerated stimuli differ");
  }
  return std::to_string(checked) + " verb/mode sets of 200; regeneration byte-identical in 4 modes";
}

std::string Discounting(Checker& c) {
  const auto sample = testing::SampleDir();
  const auto pool = lexicon::LoadNames(sample / "names.csv");
  const auto nonce = lexicon::LoadNonce(sample / "nonce.txt");

  SplitMix64 rng(305);
  std::vector<double> bias(305);
  for (double& b : bias) b = static_cast<double>(rng.NextBelow(201)) - 100;
  const auto verbs = SyntheticVerbs(bias);
  std::map<std::string, double> targets;
  std::vector<stimgen::StimulusVariant> stimuli;
  for (const auto& v : verbs) {
    auto vs = stimgen::Generate(v, stimgen::Mode::ClozeNonce(), pool, nonce, 9);
    stimuli.insert(stimuli.end(), vs.begin(), vs.end());
    targets[v.id] = v.human_bias;
  }

  scorer::OracleOptions shifted_opts;
  shifted_opts.he_shift = 0.6;
  scorer::OracleBackend plain(targets), shifted(targets, shifted_opts);
  const auto raw = Score(plain, stimuli);
  const auto raw_shifted = Score(shifted, stimuli);
  const auto table = biasmetrics::ComputeDiscountTable(raw_shifted);
  const auto adjusted = biasmetrics::ApplyDiscount(raw_shifted, table);

  // Adjusted group means are zero.
  std::map<biasmetrics::DiscountKey, double> sums;
  for (const auto& r : adjusted) {
    const std::string nonce_word = r.stimulus.nonce_word.value_or("");
    const std::string s(scorer::PronounFor(r.stimulus.subject_gender));
    const std::string o(scorer::PronounFor(r.stimulus.object_gender()));
    sums[{s, r.stimulus.subject_gender, nonce_word}] += r.scores.p_s;
    sums[{o, r.stimulus.subject_gender, nonce_word}] += r.scores.p_o;
  }
  double worst = 0;
  for (const auto& [key, sum] : sums) {
    const double n = static_cast<double>(table.groups().at(key).count);
    worst = std::max(worst, std::abs(sum / n));
  }
  c.Expect(sums.size() == table.groups().size(), "group count mismatch");
  c.Expect(worst <= 1e-9, "largest adjusted group mean " + Num(worst));

  // Exact recovery needs every group to hold both winners and losers of the
  // unshifted run.
  std::map<biasmetrics::DiscountKey, std::pair<bool, bool>> mixed;
  for (const auto& r : raw) {
    auto& m = mixed[{"", r.stimulus.subject_gender, r.stimulus.nonce_word.value_or("")}];
    (r.scores.p_s > r.scores.p_o ? m.first : m.second) = true;
  }
  for (const auto& [key, m] : mixed) c.Expect(m.first && m.second, "group " + key.nonce_word + " is one-sided");

  // Discounting the shifted run recovers the unshifted tallies.
  const auto base = biasmetrics::ComputeAllVerbBias(raw);
  const auto flipped = biasmetrics::ComputeAllVerbBias(raw_shifted);
  const auto recovered = biasmetrics::ComputeAllVerbBias(adjusted);
  std::size_t differ_raw = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    differ_raw += !(flipped[i].tally == base[i].tally);
    c.Expect(recovered[i].tally == base[i].tally, base[i].verb_id + ": discounted tally differs");
  }
  c.Expect(differ_raw > 0, "the shift did not change any raw tally");

  double total = 0;
  std::size_t groups = 0;
  for (const auto& [key, g] : table.groups()) {
    if (key.pronoun != "he" || key.subject_gender != lexicon::Gender::kMale) continue;
    total += static_cast<double>(g.count);
    ++groups;
  }
  const double mean_size = groups ? total / static_cast<double>(groups) : 0;
  c.Expect(std::abs(mean_size - 152.5) <= 2, "(he, male, nonce) mean group size " + Num(mean_size));
  return "305 verbs: max |group mean| " + Num(worst) + ", shifted run recovered (" + std::to_string(differ_raw) +
         " raw tallies had changed), mean (he, male, nonce) group size " + Num(mean_size);
}

// Rank-then-Pearson written independently of the library.
double BruteSpearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) less += w < v[i], equal += w == v[i];
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Micro-averaged F1 from the full label confusion matrix.
double ConfusionF1(const std::vector<biasmetrics::Polarity>& pred, const std::vector<biasmetrics::Polarity>& gold) {
  double m[3][3] = {};
  for (std::size_t i = 0; i < pred.size(); ++i) m[static_cast<int>(gold[i])][static_cast<int>(pred[i])] += 1;
  double tp = 0, fp = 0, fn = 0;
  for (int k = 0; k < 3; ++k) {
    tp += m[k][k];
    for (int j = 0; j < 3; ++j) {
      if (j == k) continue;
      fp += m[j][k];
      fn += m[k][j];
    }
  }
  const double precision = tp / (tp + fp), recall = tp / (tp + fn);
  return precision + recall == 0 ? 0 : 2 * precision * recall / (precision + recall);
}

std::string Statistics(Checker& c) {
  SplitMix64 rng(99);
  std::size_t vectors = 0;
  double worst = 0;
  while (vectors < 1000) {
    const std::size_t n = 3 + rng.NextBelow(10);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.NextBelow(5));
      y[i] = static_cast<double>(rng.NextBelow(n + 1)) / 2;
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
      continue;
    ++vectors;
    const double d = std::abs(stats::SpearmanRho(x, y) - BruteSpearman(x, y));
    worst = std::max(worst, d);
    c.Expect(d <= 1e-12, "rho differs by " + Num(d));
  }

  using biasmetrics::Polarity;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.NextBelow(40);
    std::vector<Polarity> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<Polarity>(rng.NextBelow(3));
      gold[i] = static_cast<Polarity>(rng.NextBelow(2));
    }
    const double d = std::abs(stats::MicroF1(pred, gold) - ConfusionF1(pred, gold));
    c.Expect(d <= 1e-12, "micro F1 differs by " + Num(d));
  }
  const double ex = stats::SpearmanRho(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
  c.Expect(std::abs(ex - 0.8) <= 1e-12, "example rho " + Num(ex));
  return "1000 rho checks (max diff " + Num(worst) + "), 1000 F1 checks, example rho " + Num(ex);
}

// Prefers whichever referent the explanation targets.
class SemanticsBackend : public scorer::Backend {
 public:
  std::string id() const override { return "semantics"; }
  scorer::Capabilities capabilities() override { return {.cloze = true}; }
  scorer::CandidateScores Score(const stimgen::StimulusVariant& v, const scorer::ScoreMethod&) override {
    return Prefer(v, v.mode.target == stimgen::Referent::kSubject);
  }
  std::vector<double> Embed(const scorer::EmbedRequest&) override { return {}; }

 protected:
  static scorer::CandidateScores Prefer(const stimgen::StimulusVariant& v, bool subject) {
    const std::string s(scorer::PronounFor(v.subject_gender)), o(scorer::PronounFor(v.object_gender()));
    return {{{s, subject ? 0.7 : 0.2}, {o, subject ? 0.2 : 0.7}}, std::nullopt, true};
  }
};

// Seeded coin flip per stimulus id.
class CoinFlipBackend : public SemanticsBackend {
 public:
  std::string id() const override { return "coin"; }
  scorer::CandidateScores Score(const stimgen::StimulusVariant& v, const scorer::ScoreMethod&) override {
    SplitMix64 rng(Fnv1a64(v.Id()) ^ 0x5EED);
    return Prefer(v, rng.Next() & 1);
  }
};

std::string Congruency(Checker& c) {
  const auto sample = testing::SampleDir();
  const auto pool = lexicon::LoadNames(sample / "names.csv");
  auto explanation_stimuli = [&](const std::vector<lexicon::VerbEntry>& verbs) {
    std::vector<stimgen::StimulusVariant> out;
    for (const auto& v : verbs) {
      const lexicon::ExplanationPair expl{v.id, "was kind", "had done well"};
      for (auto t : {stimgen::Referent::kSubject, stimgen::Referent::kObject}) {
        auto vs = stimgen::Generate(v, stimgen::Mode::Explanation(t), pool, {}, 0, &expl);
        out.insert(out.end(), vs.begin(), vs.end());
      }
    }
    return out;
  };

  std::vector<double> bias;
  for (int i = 0; i < 20; ++i) bias.push_back(66 + i), bias.push_back(-66 - i), bias.push_back(-60 + 6 * i);
  const auto verbs = SyntheticVerbs(bias);
  const auto stimuli = explanation_stimuli(verbs);

  std::map<std::string, double> ic_targets;
  for (const auto& v : verbs) ic_targets[v.id] = v.human_bias > 0 ? 100 : -100;
  scorer::OracleBackend ic(ic_targets);
  const auto ic_report = congruency::Evaluate(Score(ic, stimuli));
  c.Expect(ic_report.congruent.accuracy() == 1.0, "IC oracle congruent " + Num(ic_report.congruent.accuracy()));
  c.Expect(ic_report.incongruent.accuracy() == 0.0,
           "IC oracle incongruent " + Num(ic_report.incongruent.accuracy()));

  SemanticsBackend semantics;
  const auto sem = congruency::Evaluate(Score(semantics, stimuli));
  for (auto cond : {stimgen::Congruency::kCongruent, stimgen::Congruency::kIncongruent, stimgen::Congruency::kNeutral})
    c.Expect(sem.condition(cond).accuracy() == 1.0,
             "semantics oracle " + std::string(stimgen::ToString(cond)) + " " + Num(sem.condition(cond).accuracy()));

  CoinFlipBackend coin;
  const auto flip = congruency::Evaluate(Score(coin, stimuli));
  c.Expect(flip.overall().n >= 10000, "only " + std::to_string(flip.overall().n) + " stimuli");
  for (auto cond : {stimgen::Congruency::kCongruent, stimgen::Congruency::kIncongruent, stimgen::Congruency::kNeutral}) {
    const double a = flip.condition(cond).accuracy();
    c.Expect(std::abs(a - 0.5) <= 0.02, "coin flip " + std::string(stimgen::ToString(cond)) + " " + Num(a));
  }
  return "IC oracle " + Num(ic_report.congruent.accuracy()) + "/" + Num(ic_report.incongruent.accuracy()) +
         ", semantics " + Num(sem.overall().accuracy()) + ", coin flip " + Num(flip.congruent.accuracy()) + "/" +
         Num(flip.incongruent.accuracy()) + "/" + Num(flip.neutral.accuracy()) + " over " +
         std::to_string(flip.overall().n);
}

std::string Representations(Checker& c) {
  const auto start = Clock::now();
  const auto pool = testing::SamplePool();
  SplitMix64 rng(768);
  std::vector<double> bias(305);
  for (double& b : bias) b = static_cast<double>(rng.NextBelow(201)) - 100;
  const auto verbs = SyntheticVerbs(bias);
  std::map<std::string, double> targets;
  for (const auto& v : verbs) targets[v.id] = v.human_bias;
  scorer::OracleOptions opts;
  opts.embed_dim = 768;
  scorer::OracleBackend oracle(targets, opts);
  std::vector<repprobe::VerbEmbedding> planted;
  for (const auto& v : verbs) planted.push_back(repprobe::DecontextualizedEmbedding(oracle, v, pool));

  repprobe::ProbeConfig cfg;
  cfg.seed = 17;
  const auto report = repprobe::RunProbe(planted, bias, cfg);
  const double elapsed = Seconds(start);
  c.Expect(report.lr_mean_rho > 0.95, "planted LR rho " + Num(report.lr_mean_rho));
  c.Expect(std::abs(report.lda_mean_rho) > 0.9, "planted LDA rho " + Num(report.lda_mean_rho));
  c.Expect(!report.per_repeat.empty() && report.per_repeat[0].components == 38,
           "components " + std::to_string(report.per_repeat.empty() ? 0 : report.per_repeat[0].components));
  c.Expect(repprobe::PcaComponents(768, 0.05) == 38, "k for d=768");
  c.Expect(elapsed < 60.0, "runtime " + Num(elapsed) + " s");

  const auto again = repprobe::RunProbe(planted, bias, cfg);
  bool identical = again.per_repeat.size() == report.per_repeat.size();
  for (std::size_t i = 0; identical && i < again.per_repeat.size(); ++i) {
    identical = again.per_repeat[i].lr_rho == report.per_repeat[i].lr_rho &&
                again.per_repeat[i].lda_rho == report.per_repeat[i].lda_rho;
  }
  c.Expect(identical, "rerun under the same seed differs");

  std::vector<repprobe::VerbEmbedding> noise;
  SplitMix64 nrng(4242);
  for (const auto& v : verbs) {
    repprobe::VerbEmbedding e{v.id, std::vector<double>(768)};
    for (double& x : e.vector) x = nrng.NextUnit() - 0.5;
    noise.push_back(std::move(e));
  }
  const auto null = repprobe::RunProbe(noise, bias, cfg);
  c.Expect(std::abs(null.lr_mean_rho) <= 0.15, "noise LR rho " + Num(null.lr_mean_rho));
  c.Expect(std::abs(null.lda_mean_rho) <= 0.15, "noise LDA rho " + Num(null.lda_mean_rho));

  // Planted rank-5 data in 40 dimensions.
  Eigen::MatrixXd a(60, 5), b(5, 40);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nrng.NextUnit() - 0.5;
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = nrng.NextUnit() - 0.5;
  const Eigen::MatrixXd x = (a * b).rowwise() + Eigen::RowVectorXd::Constant(40, 3.0);
  const auto pca = repprobe::PcaFitComponents(x, 5);
  const double err = (pca.Reconstruct(pca.Transform(x)) - x).cwiseAbs().maxCoeff();
  c.Expect(err <= 1e-9, "rank-5 reconstruction error " + Num(err));

  return "planted LR " + Num(report.lr_mean_rho) + " LDA " + Num(report.lda_mean_rho) + ", noise LR " +
         Num(null.lr_mean_rho) + " LDA " + Num(null.lda_mean_rho) + ", k=38, recon err " + Num(err) +
         ", reproducible, " + Num(elapsed) + " s";
}

std::string CacheReplay(Checker& c) {
  testing::TempDir dir("acc_cache");
  const auto sample = testing::SampleDir();
  const std::string lex = (sample / "verbs.csv").string();
  const std::string cache = (dir / "cache").string();
  auto outputs = [&](const std::string& run) {
    std::string all;
    for (const char* f : {"responses.jsonl", "bias_results.csv", "correlation_report.json"})
      all += Sha256Hex(textio::ReadFile(dir / (run + "/" + f)));
    return all;
  };
  std::string endpoint;
  std::string first, second, third;
  std::size_t recorded = 0, replay_requests = 0;
  {
    testing::FakeModelServer server;
    endpoint = server.endpoint();
    auto session = [&](const std::string& run) {
      const std::string out = (dir / run).string();
      std::string err;
      c.Expect(Cli({"gen", "--lexicon", lex, "--names", (sample / "names.csv").string(), "--nonce",
                    (sample / "nonce.txt").string(), "--seed", "5", "--out", out},
                   &err) == 0,
               "gen: " + err);
      c.Expect(Cli({"probe", "--scorer", "http", "--endpoint", endpoint, "--cache-dir", cache, "--backend-id",
                    "fake-mlm", "--out", out},
                   &err) == 0,
               "probe: " + err);
      c.Expect(Cli({"bias", "--lexicon", lex, "--discount", "--out", out}, &err) == 0, "bias: " + err);
    };
    session("record");
    recorded = server.requests();
    first = outputs("record");
    session("replay");
    replay_requests = server.requests() - recorded;
    second = outputs("replay");
  }
  c.Expect(recorded > 0, "the recording session sent no requests");
  c.Expect(replay_requests == 0, "replay sent " + std::to_string(replay_requests) + " requests");
  c.Expect(first == second, "replayed outputs differ");

  // With the server gone, the replay still succeeds from the cache alone.
  const std::string out = (dir / "offline").string();
  std::string err;
  Cli({"gen", "--lexicon", lex, "--names", (sample / "names.csv").string(), "--nonce",
       (sample / "nonce.txt").string(), "--seed", "5", "--out", out});
  c.Expect(Cli({"probe", "--scorer", "http", "--endpoint", endpoint, "--cache-dir", cache, "--backend-id",
                "fake-mlm", "--out", out},
               &err) == 0,
           "offline probe: " + err);
  c.Expect(Cli({"bias", "--lexicon", lex, "--discount", "--out", out}, &err) == 0, "offline bias: " + err);
  third = outputs("offline");
  c.Expect(first == third, "offline replay outputs differ");
  return std::to_string(recorded) + " recorded requests, 0 on replay, outputs byte-identical (online and offline)";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<std::string(Checker&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle round-trip", OracleRoundTrip},
      {"bias formula", BiasFormula},
      {"stimulus enumeration", Enumeration},
      {"discounting", Discounting},
      {"statistics oracle equivalence", Statistics},
      {"congruency logic", Congruency},
      {"representation probes", Representations},
      {"cache determinism", CacheReplay},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    std::string detail;
    try {
      detail = criteria[i].run(c);
    } catch (const std::exception& e) {
      c.Expect(false, std::string("exception: ") + e.what());
    }
    const bool ok = c.ok();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].name << ": "
              << (ok ? detail : c.Summary()) << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " of " : "all ") << criteria.size()
            << (failed ? " criteria failed" : " criteria passed") << std::endl;
  return failed ? 1 : 0;
}

#include "icprobe/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "icprobe/biasmetrics.hpp"
#include "icprobe/congruency.hpp"
#include "icprobe/error.hpp"
#include "icprobe/http_backend.hpp"
#include "icprobe/lexicon.hpp"
#include "icprobe/manifest.hpp"
#include "icprobe/oracle_backend.hpp"
#include "icprobe/records.hpp"
#include "icprobe/report.hpp"
#include "icprobe/repprobe.hpp"
#include "icprobe/stats.hpp"
#include "icprobe/stimgen.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string lexicon;
  std::string names;
  std::string nonce;
  std::string explanations;
  std::uint64_t seed = 0;
  std::string mode = "cloze";
  std::string scorer = "oracle";
  std::string endpoint;
  std::string cache_dir;
  std::string backend_id;
  bool discount = false;
  std::string out;
  std::string stimuli;
  std::string responses;
  std::string embeddings;
  std::size_t jobs = 4;
  std::size_t n_perm = stats::kDefaultPermutations;
  double strong_threshold = stimgen::kStrongBiasThreshold;
  std::string oracle_targets;
  double oracle_he_shift = 0.0;
  std::size_t embed_dim = 32;
  std::string sequence_aggregate = "mean_prob";
  repprobe::ProbeConfig probe;
  std::string svg;
};

// A backend plus what the manifest needs to know about it.
struct BackendHandle {
  std::unique_ptr<scorer::Backend> backend;
  std::string id;
  std::string endpoint;
  scorer::HttpBackend* http = nullptr;
};

fs::path OutDir(const Options& o) {
  if (o.out.empty()) throw ValidationError("--out is required");
  return fs::path(o.out);
}

fs::path InputOr(const std::string& explicit_path, const Options& o, const char* default_name) {
  return explicit_path.empty() ? OutDir(o) / default_name : fs::path(explicit_path);
}

void RequireFile(const fs::path& path, const char* what) {
  if (!fs::exists(path))
    throw ValidationError(std::string("missing ") + what + ": " + path.string() +
                          " (run the earlier stage first)");
}

std::map<std::string, double> LoadOracleTargets(const fs::path& path) {
  std::map<std::string, double> targets;
  const auto lines = textio::SplitLines(textio::ReadFile(path));
  bool header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (textio::Trim(lines[i]).empty()) continue;
    auto f = textio::ParseCsvLine(lines[i]);
    if (!header) {
      if (f != std::vector<std::string>{"verb_id", "target"})
        throw ValidationError(path.string(), i + 1, "", "expected header verb_id,target");
      header = true;
      continue;
    }
    if (f.size() != 2) throw ValidationError(path.string(), i + 1, "", "expected 2 fields");
    try {
      targets[f[0]] = std::stod(f[1]);
    } catch (const std::exception&) {
      throw ValidationError(path.string(), i + 1, "target", "not a number: '" + f[1] + "'");
    }
  }
  return targets;
}

BackendHandle MakeBackend(const Options& o, RunManifest& manifest) {
  BackendHandle h;
  if (o.scorer == "oracle") {
    std::map<std::string, double> targets;
    if (!o.oracle_targets.empty()) {
      targets = LoadOracleTargets(o.oracle_targets);
      manifest.AddInput("oracle_targets", o.oracle_targets);
    } else {
      if (o.lexicon.empty())
        throw ValidationError("the oracle scorer needs --lexicon or --oracle-targets");
      for (const auto& v : lexicon::LoadVerbs(o.lexicon)) targets[v.id] = v.human_bias;
      manifest.AddInput("lexicon", o.lexicon);
    }
    scorer::OracleOptions opts;
    opts.he_shift = o.oracle_he_shift;
    opts.embed_dim = o.embed_dim;
    h.backend = std::make_unique<scorer::OracleBackend>(std::move(targets), opts);
    h.id = h.backend->id();
    manifest.options["oracle_he_shift"] = textio::FormatDouble(o.oracle_he_shift);
    manifest.options["oracle_embed_dim"] = std::to_string(o.embed_dim);
  } else if (o.scorer == "http") {
    if (o.endpoint.empty()) throw ValidationError("--scorer http needs --endpoint");
    scorer::HttpBackendOptions opts;
    opts.backend_id = o.backend_id;
    std::string cache = o.cache_dir;
    if (cache.empty()) {
      if (const char* env = std::getenv(kCacheDirEnv)) cache = env;
    }
    if (!cache.empty()) opts.cache_dir = fs::path(cache);
    if (o.sequence_aggregate == "mean_logprob") {
      opts.sequence_aggregate = scorer::SequenceAggregate::kMeanLogProb;
    } else if (o.sequence_aggregate != "mean_prob") {
      throw ValidationError("--sequence-aggregate must be mean_prob or mean_logprob");
    }
    auto backend = std::make_unique<scorer::HttpBackend>(o.endpoint, opts);
    h.http = backend.get();
    h.id = backend->id();
    h.endpoint = o.endpoint;
    h.backend = std::move(backend);
    manifest.options["sequence_aggregate"] = o.sequence_aggregate;
  } else {
    throw ValidationError("--scorer must be oracle or http");
  }
  manifest.backend_id = h.id;
  manifest.endpoint = h.endpoint;
  return h;
}

std::string WriteJson(const fs::path& path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  textio::WriteFile(path, text);
  return text;
}

int CmdGen(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  if (o.lexicon.empty() || o.names.empty())
    throw ValidationError("gen needs --lexicon and --names");
  const auto kind = stimgen::ParseModeKind(o.mode);

  RunManifest manifest;
  manifest.stage = "gen";
  manifest.seed = o.seed;
  manifest.mode = std::string(stimgen::ToString(kind));
  manifest.out_dir = o.out;
  manifest.AddInput("lexicon", o.lexicon);
  manifest.AddInput("names", o.names);
  manifest.options["strong_threshold"] = textio::FormatDouble(o.strong_threshold);

  const auto verbs = lexicon::LoadVerbs(o.lexicon);
  const auto pool = lexicon::LoadNames(o.names);
  lexicon::NonceLexicon nonce;
  std::vector<lexicon::ExplanationPair> explanations;
  if (kind == stimgen::ModeKind::kClozeNonce || kind == stimgen::ModeKind::kSwappedCloze) {
    if (o.nonce.empty()) throw ValidationError("mode '" + o.mode + "' needs --nonce");
    nonce = lexicon::LoadNonce(o.nonce);
    manifest.AddInput("nonce", o.nonce);
  }
  if (kind == stimgen::ModeKind::kExplanation) {
    if (o.explanations.empty()) throw ValidationError("explanation mode needs --explanations");
    explanations = lexicon::LoadExplanations(o.explanations);
    manifest.AddInput("explanations", o.explanations);
    for (const auto& p : explanations) {
      if (std::none_of(verbs.begin(), verbs.end(), [&](const auto& v) { return v.id == p.verb_id; }))
        throw ValidationError(o.explanations, 0, "verb_id",
                              "explanation pair for unknown verb '" + p.verb_id + "'");
    }
  }

  std::vector<stimgen::StimulusVariant> stimuli;
  std::size_t skipped = 0;
  for (const auto& verb : verbs) {
    std::vector<stimgen::Mode> modes;
    if (kind == stimgen::ModeKind::kExplanation) {
      if (!lexicon::FindExplanation(explanations, verb.id)) {
        ++skipped;
        continue;
      }
      modes = {stimgen::Mode::Explanation(stimgen::Referent::kSubject),
               stimgen::Mode::Explanation(stimgen::Referent::kObject)};
    } else {
      modes = {stimgen::Mode{kind, std::nullopt}};
    }
    for (const auto& mode : modes) {
      auto batch = stimgen::Generate(verb, mode, pool, nonce, o.seed,
                                     lexicon::FindExplanation(explanations, verb.id),
                                     o.strong_threshold);
      stimuli.insert(stimuli.end(), std::make_move_iterator(batch.begin()),
                     std::make_move_iterator(batch.end()));
    }
  }

  const std::string hash = WriteManifest(manifest, out_dir);
  const fs::path path = out_dir / "stimuli.jsonl";
  textio::WriteFile(path, records::FormatStimuli(stimuli, o.seed, hash));
  out << "wrote " << stimuli.size() << " stimuli to " << path.string() << "\n";
  if (skipped) out << "skipped " << skipped << " verbs without an explanation pair\n";
  return kOk;
}

int CmdProbe(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  const fs::path stimuli_path = InputOr(o.stimuli, o, "stimuli.jsonl");
  RequireFile(stimuli_path, "stimuli file");

  RunManifest manifest;
  manifest.stage = "probe";
  manifest.out_dir = o.out;
  manifest.AddInput("stimuli", stimuli_path);
  manifest.options["jobs"] = std::to_string(o.jobs);
  const auto stimuli = records::ReadStimuli(stimuli_path);
  if (stimuli.empty()) throw ValidationError(stimuli_path.string() + ": no stimuli");
  manifest.mode = std::string(stimgen::ToString(stimuli.front().mode.kind));

  BackendHandle h = MakeBackend(o, manifest);
  const auto scores = scorer::ScoreAll(*h.backend, stimuli, o.jobs);
  std::vector<scorer::ScoredStimulus> responses;
  responses.reserve(stimuli.size());
  for (std::size_t i = 0; i < stimuli.size(); ++i) responses.push_back({stimuli[i], scores[i]});

  const std::string hash = WriteManifest(manifest, out_dir);
  const fs::path path = out_dir / "responses.jsonl";
  textio::WriteFile(path, records::FormatResponses(responses, h.id, hash));
  out << "scored " << responses.size() << " stimuli with backend '" << h.id << "'";
  if (h.http) out << " (" << h.http->network_requests() << " network requests)";
  out << "; wrote " << path.string() << "\n";
  return kOk;
}

int CmdBias(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  const fs::path responses_path = InputOr(o.responses, o, "responses.jsonl");
  RequireFile(responses_path, "responses file");
  if (o.lexicon.empty()) throw ValidationError("bias needs --lexicon for the human norms");

  RunManifest manifest;
  manifest.stage = "bias";
  manifest.seed = o.seed;
  manifest.out_dir = o.out;
  manifest.AddInput("responses", responses_path);
  manifest.AddInput("lexicon", o.lexicon);
  manifest.options["discount"] = o.discount ? "true" : "false";
  manifest.options["n_perm"] = std::to_string(o.n_perm);

  const auto set = records::ReadResponses(responses_path);
  if (set.responses.empty()) throw ValidationError(responses_path.string() + ": no responses");
  manifest.backend_id = set.backend_id;
  manifest.mode = std::string(stimgen::ToString(set.responses.front().stimulus.mode.kind));
  const auto verbs = lexicon::LoadVerbs(o.lexicon);
  std::map<std::string, const lexicon::VerbEntry*> by_id;
  for (const auto& v : verbs) by_id[v.id] = &v;

  std::vector<scorer::ScoredStimulus> scored = set.responses;
  if (o.discount) {
    const auto table = biasmetrics::ComputeDiscountTable(set.responses);
    scored = biasmetrics::ApplyDiscount(set.responses, table);
  }
  const auto results = biasmetrics::ComputeAllVerbBias(scored);

  std::vector<records::BiasRow> rows;
  std::vector<double> model_bias, human_bias;
  std::vector<biasmetrics::Polarity> predicted, gold;
  for (const auto& r : results) {
    records::BiasRow row{r.verb_id, "", r.tally, r.bias, r.polarity, std::nullopt};
    if (auto it = by_id.find(r.verb_id); it != by_id.end()) {
      row.lemma = it->second->lemma;
      row.human_bias = it->second->human_bias;
      if (r.bias) {
        model_bias.push_back(*r.bias);
        human_bias.push_back(it->second->human_bias);
      }
      if (it->second->human_bias != 0.0) {
        predicted.push_back(r.polarity);
        gold.push_back(biasmetrics::PolarityOf(it->second->human_bias));
      }
    }
    rows.push_back(std::move(row));
  }

  json report = {{"n", model_bias.size()},
                 {"n_f1", gold.size()},
                 {"discounted", o.discount},
                 {"backend_id", set.backend_id},
                 {"significance_method", "permutation"},
                 {"n_perm", o.n_perm},
                 {"perm_seed", o.seed},
                 {"rho", nullptr},
                 {"p_value", nullptr},
                 {"significant", false},
                 {"f1", nullptr},
                 {"top_rank_rate", nullptr}};
  try {
    const auto corr = stats::Correlate(model_bias, human_bias, o.n_perm, o.seed);
    report["rho"] = corr.rho;
    report["p_value"] = corr.p_value;
    report["significant"] = corr.significant;
  } catch (const Error& e) {
    report["rho_undefined_reason"] = e.what();
  }
  if (!gold.empty()) report["f1"] = stats::MicroF1(predicted, gold);
  try {
    report["top_rank_rate"] = biasmetrics::TopRankRate(set.responses);
  } catch (const ValidationError&) {
    // backend reports no top tokens
  }

  const std::string hash = WriteManifest(manifest, out_dir);
  report["manifest_hash"] = hash;
  textio::WriteFile(out_dir / "bias_results.csv", records::FormatBiasResults(rows, hash));
  WriteJson(out_dir / "correlation_report.json", report);
  out << "verbs: " << rows.size() << "  rho: "
      << (report["rho"].is_null() ? "undefined" : textio::FormatDouble(report["rho"].get<double>()))
      << "  f1: "
      << (report["f1"].is_null() ? "undefined" : textio::FormatDouble(report["f1"].get<double>()))
      << (o.discount ? "  (discounted)" : "") << "\n";
  return kOk;
}

int CmdCongruency(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  const fs::path responses_path = InputOr(o.responses, o, "responses.jsonl");
  RequireFile(responses_path, "responses file");

  RunManifest manifest;
  manifest.stage = "congruency";
  manifest.out_dir = o.out;
  manifest.AddInput("responses", responses_path);
  const auto set = records::ReadResponses(responses_path);
  manifest.backend_id = set.backend_id;
  manifest.mode = "explanation";
  const auto result = congruency::Evaluate(set.responses);

  json j = report::ToJson(result);
  j["backend_id"] = set.backend_id;
  j["manifest_hash"] = WriteManifest(manifest, out_dir);
  WriteJson(out_dir / "congruency_report.json", j);
  out << "congruent " << textio::FormatDouble(result.congruent.accuracy()) << "  incongruent "
      << textio::FormatDouble(result.incongruent.accuracy()) << "  neutral "
      << textio::FormatDouble(result.neutral.accuracy()) << "\n";
  return kOk;
}

std::vector<repprobe::VerbEmbedding> ComputeEmbeddings(scorer::Backend& backend,
                                                       const std::vector<lexicon::VerbEntry>& verbs,
                                                       const lexicon::NamePool& pool,
                                                       std::size_t jobs) {
  if (!backend.capabilities().embed) throw CapabilityError("backend cannot embed");
  std::vector<repprobe::VerbEmbedding> out(verbs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < verbs.size();) {
      try {
        out[i] = repprobe::DecontextualizedEmbedding(backend, verbs[i], pool);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = verbs.size();
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < std::max<std::size_t>(1, jobs); ++t) threads.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

int CmdRepprobe(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  if (o.lexicon.empty()) throw ValidationError("repprobe needs --lexicon");
  o.probe.Validate();

  RunManifest manifest;
  manifest.stage = "repprobe";
  manifest.seed = o.probe.seed;
  manifest.out_dir = o.out;
  manifest.AddInput("lexicon", o.lexicon);
  manifest.options["pca_fraction"] = textio::FormatDouble(o.probe.pca_fraction);
  manifest.options["n_repeats"] = std::to_string(o.probe.n_repeats);
  manifest.options["split_fraction"] = textio::FormatDouble(o.probe.split_fraction);
  manifest.options["lda_ridge"] = textio::FormatDouble(o.probe.lda_ridge);

  const auto verbs = lexicon::LoadVerbs(o.lexicon);
  std::vector<repprobe::VerbEmbedding> embeddings;
  bool computed = false;
  if (!o.embeddings.empty()) {
    RequireFile(o.embeddings, "embeddings file");
    manifest.AddInput("embeddings", o.embeddings);
    embeddings = records::ReadEmbeddings(o.embeddings);
  } else {
    if (o.names.empty()) throw ValidationError("repprobe needs --names or --embeddings");
    manifest.AddInput("names", o.names);
    const auto pool = lexicon::LoadNames(o.names);
    BackendHandle h = MakeBackend(o, manifest);
    embeddings = ComputeEmbeddings(*h.backend, verbs, pool, o.jobs);
    computed = true;
  }

  std::map<std::string, double> human;
  for (const auto& v : verbs) human[v.id] = v.human_bias;
  std::vector<double> bias;
  for (const auto& e : embeddings) {
    auto it = human.find(e.verb_id);
    if (it == human.end())
      throw ValidationError("embedding for verb '" + e.verb_id + "' has no human norm");
    bias.push_back(it->second);
  }
  const auto result = repprobe::RunProbe(embeddings, bias, o.probe);

  const std::string hash = WriteManifest(manifest, out_dir);
  if (computed)
    textio::WriteFile(out_dir / "embeddings.jsonl", records::FormatEmbeddings(embeddings, hash));
  json j = report::ToJson(result, o.probe);
  j["n_verbs"] = embeddings.size();
  j["dim"] = embeddings.empty() ? 0 : embeddings.front().dim();
  j["manifest_hash"] = hash;
  WriteJson(out_dir / "probe_report.json", j);
  out << "LR mean rho " << textio::FormatDouble(result.lr_mean_rho) << "  LDA mean rho "
      << textio::FormatDouble(result.lda_mean_rho) << "\n";
  return kOk;
}

int CmdReport(const Options& o, std::ostream& out) {
  const fs::path out_dir = OutDir(o);
  report::SummaryInputs in;
  auto read_json = [&](const char* name) -> std::optional<json> {
    const fs::path p = out_dir / name;
    if (!fs::exists(p)) return std::nullopt;
    try {
      return json::parse(textio::ReadFile(p));
    } catch (const json::parse_error& e) {
      throw ValidationError(p.string(), 0, "", std::string("malformed JSON: ") + e.what());
    }
  };
  if (const fs::path p = out_dir / "bias_results.csv"; fs::exists(p))
    in.bias_rows = records::ParseBiasResults(textio::ReadFile(p), p.string());
  in.correlation = read_json("correlation_report.json");
  in.congruency = read_json("congruency_report.json");
  in.probe = read_json("probe_report.json");

  const std::string summary = report::RenderSummary(in);
  textio::WriteFile(out_dir / "summary.txt", summary);
  out << summary;
  if (!o.svg.empty()) {
    if (!in.bias_rows) throw ValidationError("--svg needs bias_results.csv in " + out_dir.string());
    std::string label = "model";
    if (in.correlation && (*in.correlation)["backend_id"].is_string())
      label = (*in.correlation)["backend_id"].get<std::string>();
    textio::WriteFile(o.svg, report::RenderRatioSvg(report::CountModelPolarity(*in.bias_rows),
                                                    report::CountHumanPolarity(*in.bias_rows),
                                                    label));
  }
  return kOk;
}

void AddScorerFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--scorer", o.scorer, "Scoring backend")->check(CLI::IsMember({"oracle", "http"}));
  cmd->add_option("--endpoint", o.endpoint, "Model server base URL, e.g. http://127.0.0.1:8080");
  cmd->add_option("--cache-dir", o.cache_dir,
                  std::string("Response cache directory (overrides $") + kCacheDirEnv + ")");
  cmd->add_option("--backend-id", o.backend_id, "Backend id used for the cache file name");
  cmd->add_option("--jobs", o.jobs, "Concurrent requests")->check(CLI::PositiveNumber);
  cmd->add_option("--oracle-targets", o.oracle_targets, "CSV verb_id,target for the oracle");
  cmd->add_option("--oracle-he-shift", o.oracle_he_shift, "Constant added to oracle p(he)");
  cmd->add_option("--embed-dim", o.embed_dim, "Oracle embedding dimension")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sequence-aggregate", o.sequence_aggregate,
                  "Sequence score aggregate: mean_prob or mean_logprob")
      ->check(CLI::IsMember({"mean_prob", "mean_logprob"}));
}

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Implicit-causality probing toolkit for pretrained language models", "icprobe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate stimuli.jsonl");
  gen->add_option("--lexicon", o.lexicon, "verbs.csv")->required();
  gen->add_option("--names", o.names, "names.csv")->required();
  gen->add_option("--nonce", o.nonce, "nonce.txt (cloze and swapped modes)");
  gen->add_option("--explanations", o.explanations, "explanations.jsonl (explanation mode)");
  gen->add_option("--seed", o.seed, "Master seed");
  gen->add_option("--mode", o.mode, "Stimulus mode")
      ->check(CLI::IsMember({"cloze", "open", "swapped", "explanation"}));
  gen->add_option("--strong-threshold", o.strong_threshold, "|bias| above which a verb is strongly biased");
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* probe = app.add_subcommand("probe", "Score stimuli into responses.jsonl");
  probe->add_option("--stimuli", o.stimuli, "Defaults to <out>/stimuli.jsonl");
  probe->add_option("--lexicon", o.lexicon, "verbs.csv (oracle targets)");
  AddScorerFlags(probe, o);
  probe->add_option("--out", o.out, "Output directory")->required();

  auto* bias = app.add_subcommand("bias", "Verb bias scores and correlation with human norms");
  bias->add_option("--responses", o.responses, "Defaults to <out>/responses.jsonl");
  bias->add_option("--lexicon", o.lexicon, "verbs.csv with human norms")->required();
  bias->add_flag("--discount", o.discount, "Subtract (pronoun, gender, nonce) group means");
  bias->add_option("--n-perm", o.n_perm, "Permutations for the significance test");
  bias->add_option("--seed", o.seed, "Permutation seed");
  bias->add_option("--out", o.out, "Output directory")->required();

  auto* cong = app.add_subcommand("congruency", "Accuracy by congruency condition");
  cong->add_option("--responses", o.responses, "Defaults to <out>/responses.jsonl");
  cong->add_option("--out", o.out, "Output directory")->required();

  auto* rep = app.add_subcommand("repprobe", "Representation probes (PCA + LR / LDA)");
  rep->add_option("--lexicon", o.lexicon, "verbs.csv with human norms")->required();
  rep->add_option("--names", o.names, "names.csv (when embeddings are computed)");
  rep->add_option("--embeddings", o.embeddings, "Precomputed embeddings.jsonl");
  AddScorerFlags(rep, o);
  rep->add_option("--pca-fraction", o.probe.pca_fraction, "PCA size as a fraction of d");
  rep->add_option("--repeats", o.probe.n_repeats, "Random splits");
  rep->add_option("--split-fraction", o.probe.split_fraction, "Training share per split");
  rep->add_option("--lda-ridge", o.probe.lda_ridge, "Relative ridge on the within-class scatter");
  rep->add_option("--seed", o.probe.seed, "Master seed for the splits");
  rep->add_option("--out", o.out, "Output directory")->required();

  auto* rpt = app.add_subcommand("report", "Human-readable summary of a run directory");
  rpt->add_option("--out", o.out, "Run directory")->required();
  rpt->add_option("--svg", o.svg, "Also write an S/O ratio bar chart");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "icprobe: " << e.what() << "\n";
    return kValidationFailure;
  }

  if (gen->parsed()) return CmdGen(o, out);
  if (probe->parsed()) return CmdProbe(o, out);
  if (bias->parsed()) return CmdBias(o, out);
  if (cong->parsed()) return CmdCongruency(o, out);
  if (rep->parsed()) return CmdRepprobe(o, out);
  if (rpt->parsed()) return CmdReport(o, out);
  return kInternalFailure;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return Dispatch(args, out, err);
  } catch (const Error& e) {
    err << "icprobe: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kBackend:
      case ErrorKind::kProtocol:
      case ErrorKind::kUnscorable:
        return kBackendFailure;
      default:
        return kValidationFailure;
    }
  } catch (const std::exception& e) {
    err << "icprobe: internal error: " << e.what() << "\n";
    return kInternalFailure;
  }
}

}  // namespace icprobe::cli

#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "icprobe/cli.hpp"
#include "icprobe/textio.hpp"
#include "support/fake_model_server.hpp"
#include "support/fixtures.hpp"

using namespace icprobe;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Sample(const char* name) { return (testing::SampleDir() / name).string(); }

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(Cli({"--help"}).code == cli::kOk);
  CHECK(Cli({"--help"}).out.find("gen") != std::string::npos);
  CHECK(Cli({}).code == cli::kValidationFailure);
  CHECK(Cli({"frobnicate"}).code == cli::kValidationFailure);
  CHECK(Cli({"gen", "--names", Sample("names.csv"), "--out", "/tmp/x"}).code == cli::kValidationFailure);
  CHECK(Cli({"gen", "--lexicon", Sample("verbs.csv"), "--names", Sample("names.csv"), "--mode", "bogus",
             "--out", "/tmp/x"})
            .code == cli::kValidationFailure);
}

TEST_CASE("invalid input files exit with 1 and name the file") {
  testing::TempDir dir("cli_bad");
  textio::WriteFile(dir / "verbs.csv", "id,lemma,frame_past,human_bias,language\nv1,x,{SUBJ} x {OBJ},150,en\n");
  const auto r = Cli({"gen", "--lexicon", (dir / "verbs.csv").string(), "--names", Sample("names.csv"),
                      "--nonce", Sample("nonce.txt"), "--out", (dir / "run").string()});
  CHECK(r.code == cli::kValidationFailure);
  CHECK(r.err.find("verbs.csv:2") != std::string::npos);
  CHECK(Cli({"probe", "--out", (dir / "empty").string()}).code == cli::kValidationFailure);
}

TEST_CASE("oracle pipeline through every stage") {
  testing::TempDir dir("cli_ok");
  const std::string out = (dir / "run").string();
  const std::vector<std::string> lex = {"--lexicon", Sample("verbs.csv")};
  auto with = [&](std::vector<std::string> a, const std::vector<std::string>& extra) {
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  REQUIRE(Cli(with({"gen", "--names", Sample("names.csv"), "--nonce", Sample("nonce.txt"), "--seed", "3",
                    "--out", out},
                   lex))
              .code == 0);
  REQUIRE(Cli(with({"probe", "--out", out, "--jobs", "2"}, lex)).code == 0);
  REQUIRE(Cli(with({"bias", "--out", out, "--n-perm", "200"}, lex)).code == 0);
  const json corr = json::parse(textio::ReadFile(dir / "run/correlation_report.json"));
  CHECK(corr["rho"] == 1.0);
  CHECK(corr["f1"] == 1.0);
  CHECK(corr["n"] == 20);
  CHECK(corr["discounted"] == false);
  CHECK(corr["backend_id"] == "oracle");
  CHECK(corr["significance_method"] == "permutation");
  for (const char* stage : {"gen", "probe", "bias"})
    CHECK(std::filesystem::exists(dir / ("run/" + std::string(stage) + ".manifest.json")));

  REQUIRE(Cli(with({"bias", "--discount", "--out", out, "--n-perm", "200"}, lex)).code == 0);
  CHECK(json::parse(textio::ReadFile(dir / "run/correlation_report.json"))["discounted"] == true);

  REQUIRE(Cli(with({"repprobe", "--names", Sample("names.csv"), "--repeats", "5", "--embed-dim", "16", "--out",
                    out},
                   lex))
              .code == 0);
  const json probe = json::parse(textio::ReadFile(dir / "run/probe_report.json"));
  CHECK(probe["lr_mean_rho"].get<double>() > 0.9);
  CHECK(probe["per_repeat"].size() == 5);
  CHECK(std::filesystem::exists(dir / "run/embeddings.jsonl"));
  REQUIRE(Cli(with({"repprobe", "--embeddings", (dir / "run/embeddings.jsonl").string(), "--repeats", "5",
                    "--out", (dir / "run2").string()},
                   lex))
              .code == 0);
  CHECK(json::parse(textio::ReadFile(dir / "run2/probe_report.json"))["lr_mean_rho"] == probe["lr_mean_rho"]);

  const auto report = Cli({"report", "--out", out, "--svg", (dir / "ratio.svg").string()});
  REQUIRE(report.code == 0);
  CHECK(report.out.find("Spearman rho") != std::string::npos);
  CHECK(textio::ReadFile(dir / "ratio.svg").find("<svg") == 0);
  CHECK(std::filesystem::exists(dir / "run/summary.txt"));
}

TEST_CASE("explanation mode and congruency") {
  testing::TempDir dir("cli_expl");
  const std::string out = (dir / "run").string();
  REQUIRE(Cli({"gen", "--lexicon", Sample("verbs.csv"), "--names", Sample("names.csv"), "--explanations",
               Sample("explanations.jsonl"), "--mode", "explanation", "--out", out})
              .code == 0);
  REQUIRE(Cli({"probe", "--lexicon", Sample("verbs.csv"), "--out", out}).code == 0);
  REQUIRE(Cli({"congruency", "--out", out}).code == 0);
  const json j = json::parse(textio::ReadFile(dir / "run/congruency_report.json"));
  CHECK(j["aggregation"] == "micro");
  CHECK(j["overall"]["n"] == 2400);
  // Congruency on non-explanation stimuli is a usage error.
  const std::string cloze = (dir / "cloze").string();
  REQUIRE(Cli({"gen", "--lexicon", Sample("verbs.csv"), "--names", Sample("names.csv"), "--nonce",
               Sample("nonce.txt"), "--out", cloze})
              .code == 0);
  REQUIRE(Cli({"probe", "--lexicon", Sample("verbs.csv"), "--out", cloze}).code == 0);
  CHECK(Cli({"congruency", "--out", cloze}).code == cli::kValidationFailure);
}

TEST_CASE("backend failures exit with 2") {
  testing::TempDir dir("cli_http");
  const std::string out = (dir / "run").string();
  REQUIRE(Cli({"gen", "--lexicon", Sample("verbs.csv"), "--names", Sample("names.csv"), "--nonce",
               Sample("nonce.txt"), "--out", out})
              .code == 0);
  testing::FakeModelServer server;
  server.set_fault(testing::Fault::kProbabilityOutOfRange);
  const auto bad = Cli({"probe", "--scorer", "http", "--endpoint", server.endpoint(), "--cache-dir",
                        (dir / "cache").string(), "--out", out});
  CHECK(bad.code == cli::kBackendFailure);
  CHECK(bad.err.find("protocol violation") != std::string::npos);
  server.set_fault(testing::Fault::kUnscorable);
  CHECK(Cli({"probe", "--scorer", "http", "--endpoint", server.endpoint(), "--out", out}).code ==
        cli::kBackendFailure);
  CHECK(Cli({"probe", "--scorer", "http", "--out", out}).code == cli::kValidationFailure);
}

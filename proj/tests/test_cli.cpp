#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "absa/cli.hpp"
#include "absa/embeddings.hpp"
#include "absa/textio.hpp"
#include "test_util.hpp"

using namespace absa;
namespace fs = std::filesystem;

namespace {

int run_cli(std::initializer_list<std::string> args) {
  return absa::cli::run(std::vector<std::string>(args));
}

void gen(const test::TempDir& dir, int sentences = 30, int dim = 10) {
  REQUIRE(run_cli({"gen-corpus", "--out", dir.path.string(), "--sentences",
               std::to_string(sentences), "--dim", std::to_string(dim)}) ==
          0);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-corpus writes the full resource set") {
  test::TempDir dir("cli_gen");
  gen(dir, 12, 6);
  for (const char* name : {"corpus.jsonl", "embeddings.txt", "sentic.tsv",
                           "tagset.txt", "synonyms.txt"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir.path / name));
  }
}

TEST_CASE("usage errors exit with 1, missing data with 2") {
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"retrofit", "--embeddings", "/nonexistent/e.txt", "--graph",
             "/nonexistent/g.txt", "--out", "/tmp/absa_nowhere.txt"}) == 2);
}

TEST_CASE("retrofit with an empty graph reproduces the input bytes") {
  test::TempDir dir("cli_retro");
  gen(dir, 12, 6);
  {
    std::ofstream empty(dir.file("empty_graph.txt"));
  }
  REQUIRE(run_cli({"retrofit", "--embeddings", dir.file("embeddings.txt"),
               "--graph", dir.file("empty_graph.txt"), "--out",
               dir.file("retro.txt")}) == 0);
  CHECK(textio::read_file(dir.file("retro.txt")) ==
        textio::read_file(dir.file("embeddings.txt")));
}

TEST_CASE("retrofit with the synonym graph moves linked vectors closer") {
  test::TempDir dir("cli_retro_move");
  gen(dir, 20, 8);
  REQUIRE(run_cli({"retrofit", "--embeddings", dir.file("embeddings.txt"),
               "--graph", dir.file("synonyms.txt"), "--out",
               dir.file("retro.txt")}) == 0);
  WordVectors before = load_embeddings(dir.file("embeddings.txt"));
  WordVectors after = load_embeddings(dir.file("retro.txt"));
  const double d_before =
      (lookup(before, "great") - lookup(before, "excellent")).norm();
  const double d_after =
      (lookup(after, "great") - lookup(after, "excellent")).norm();
  CHECK(d_after < d_before);
}

TEST_CASE("train, extract and reload work end to end") {
  test::TempDir dir("cli_train");
  gen(dir, 24, 8);
  const std::string corpus = dir.file("corpus.jsonl");
  const std::string emb = dir.file("embeddings.txt");
  const std::string sentic = dir.file("sentic.tsv");
  const std::string tags = dir.file("tagset.txt");

  REQUIRE(run_cli({"train-tagger", "--corpus", corpus, "--embeddings", emb,
               "--sentic", sentic, "--tagset", tags, "--out",
               dir.file("tagger"), "--epochs", "3", "--seed", "5"}) == 0);
  CHECK(fs::exists(dir.file("tagger.params")));
  CHECK(fs::exists(dir.file("tagger.manifest.json")));
  CHECK(fs::exists(dir.file("tagger.run.json")));

  // the run manifest records config, seed and the loss trace
  const auto run_info =
      nlohmann::json::parse(textio::read_file(dir.file("tagger.run.json")));
  CHECK(run_info["seed"] == 5);
  CHECK(run_info["epochs"] == 3);
  CHECK(run_info["loss_trace"].size() == 3);

  REQUIRE(run_cli({"train-classifier", "--corpus", corpus, "--embeddings", emb,
               "--sentic", sentic, "--tagset", tags, "--out",
               dir.file("cls"), "--epochs", "3", "--seed", "5"}) == 0);

  REQUIRE(run_cli({"extract", "--input", corpus, "--embeddings", emb, "--sentic",
               sentic, "--tagset", tags, "--tagger", dir.file("tagger"),
               "--classifier", dir.file("cls"), "--out",
               dir.file("opinions.jsonl")}) == 0);
  std::ifstream in(dir.file("opinions.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("text"));
    CHECK(j.contains("opinions"));
  }
  CHECK(lines == 24);
}

TEST_CASE("extract on an empty input writes an empty output and exits 0") {
  test::TempDir dir("cli_extract_empty");
  gen(dir, 12, 6);
  REQUIRE(run_cli({"train-tagger", "--corpus", dir.file("corpus.jsonl"),
               "--embeddings", dir.file("embeddings.txt"), "--tagset",
               dir.file("tagset.txt"), "--out", dir.file("tagger"),
               "--epochs", "1"}) == 0);
  REQUIRE(run_cli({"train-classifier", "--corpus", dir.file("corpus.jsonl"),
               "--embeddings", dir.file("embeddings.txt"), "--tagset",
               dir.file("tagset.txt"), "--out", dir.file("cls"), "--epochs",
               "1"}) == 0);
  {
    std::ofstream empty(dir.file("empty.jsonl"));
  }
  REQUIRE(run_cli({"extract", "--input", dir.file("empty.jsonl"), "--embeddings",
               dir.file("embeddings.txt"), "--tagset", dir.file("tagset.txt"),
               "--tagger", dir.file("tagger"), "--classifier",
               dir.file("cls"), "--out", dir.file("out.jsonl")}) == 0);
  CHECK(textio::read_file(dir.file("out.jsonl")).empty());
}

TEST_CASE("eval-cv writes a structural report with one entry per fold") {
  test::TempDir dir("cli_cv");
  gen(dir, 20, 6);
  REQUIRE(run_cli({"eval-cv", "--corpus", dir.file("corpus.jsonl"),
               "--embeddings", dir.file("embeddings.txt"), "--sentic",
               dir.file("sentic.tsv"), "--tagset", dir.file("tagset.txt"),
               "--out", dir.file("cv"), "--k", "5", "--tagger-epochs", "1",
               "--classifier-epochs", "1"}) == 0);
  const auto report = nlohmann::json::parse(
      textio::read_file((fs::path(dir.file("cv")) / "report.json").string()));
  CHECK(report["folds"].size() == 5);
  CHECK(report["means"].contains("f1"));
  CHECK(fs::exists(fs::path(dir.file("cv")) / "report.txt"));
  for (int f = 0; f < 5; ++f) {
    CHECK(fs::exists(fs::path(dir.file("cv")) /
                     ("fold" + std::to_string(f) + ".tagger.params")));
    CHECK(fs::exists(fs::path(dir.file("cv")) /
                     ("fold" + std::to_string(f) + ".classifier.params")));
  }
}

TEST_CASE("malformed corpus lines exit with the data error code") {
  test::TempDir dir("cli_badcorpus");
  gen(dir, 12, 6);
  std::ofstream bad(dir.file("bad.jsonl"));
  bad << "{\"text\": \"ok line\"}\n";
  bad << "{broken json\n";
  bad.close();
  CHECK(run_cli({"train-tagger", "--corpus", dir.file("bad.jsonl"),
             "--embeddings", dir.file("embeddings.txt"), "--tagset",
             dir.file("tagset.txt"), "--out", dir.file("t"), "--epochs",
             "1"}) == 2);
}

}  // TEST_SUITE

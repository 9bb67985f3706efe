#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cellac/eval.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace cellac;
using namespace cellac::test;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Result cli(const std::string& args) {
  const std::string cmd = std::string(CELLAC_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::size_t count_lines(const std::filesystem::path& f) {
  std::ifstream in(f);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = temp_dir("cli");
    const auto src = (dir_ / "src").string();
    work_ = (dir_ / "w").string();
    ASSERT_EQ(cli("synth --out " + src + " --topics 2 --entities 20 --tables 8 --distractors 3 --seed 2").status, 0);
    auto r = cli("ingest --work " + work_ + " --corpus " + src + "/corpus.jsonl --triples " + src +
                 "/triples.tsv --labels " + src + "/labels.tsv");
    ASSERT_EQ(r.status, 0) << r.out;
  }
  static void TearDownTestSuite() { std::filesystem::remove_all(dir_); }

  static std::string w() { return " --work " + work_; }

  static inline std::filesystem::path dir_;
  static inline std::string work_;
};

}  // namespace

TEST_F(CliPipeline, MissingPrerequisiteNamesProducer) {
  auto empty = (dir_ / "empty").string();
  auto r = cli("build-stats --work " + empty);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("cellac ingest"), std::string::npos) << r.out;
}

TEST_F(CliPipeline, FullPipeline) {
  auto r = cli("make-testset" + w() + " --per-type 2 --cells 3");
  ASSERT_EQ(r.status, 0) << r.out;
  auto tc = read_testset(std::filesystem::path(work_) / "testset.jsonl");
  EXPECT_EQ(tc.cells.size(), 24u);
  EXPECT_EQ(count_lines(std::filesystem::path(work_) / "qrels.tsv"), 24u);

  // Ranking needs statistics first.
  r = cli("suggest" + w() + " --entity x --heading y");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("cellac build-stats"), std::string::npos) << r.out;

  for (const char* step : {"build-stats", "train-embeddings"}) {
    r = cli(std::string(step) + w());
    ASSERT_EQ(r.status, 0) << step << ": " << r.out;
  }
  r = cli("train-tmatch" + w() + " --pairs " + (dir_ / "src" / "tmatch_pairs.tsv").string());
  ASSERT_EQ(r.status, 0) << r.out;
  r = cli("train-ltr" + w() + " --per-type 2 --cells 3");
  ASSERT_EQ(r.status, 0) << r.out;
  r = cli("suggest" + w() + " --testset");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto run = std::filesystem::path(work_) / "run.tsv";
  EXPECT_EQ(read_run(run).size(), 24u);

  r = cli("evaluate" + w() + " --run " + run.string() + " --json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.dump().find("nan"), std::string::npos);

  auto manifest = nlohmann::json::parse(std::ifstream(std::filesystem::path(work_) / "manifest.json"));
  for (const char* key : {"corpus", "h2h", "h2p", "embeddings", "tmatch", "ltr", "testset", "qrels"})
    EXPECT_TRUE(manifest["artifacts"].contains(key)) << key;

  // Single-cell suggestion in JSON matches the engine's response schema.
  const auto& cell = tc.cells.front();
  r = cli("suggest" + w() + " --entity " + cell.entity + " --heading '" + cell.heading + "' --k 3 --json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto s = nlohmann::json::parse(r.out);
  EXPECT_EQ(s["method"], "ltr");
  EXPECT_LE(s["suggestions"].size(), 3u);
}

TEST_F(CliPipeline, UsageErrors) {
  EXPECT_EQ(cli("suggest --k 0" + w()).status, 2);
  EXPECT_EQ(cli("no-such-command").status, 2);
  auto r = cli("rules");
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("rules"));
}

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  CliResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " '" + std::string(MORPHPIECE_CLI) + "' " + args + " >'" + (dir / "out").string() +
                      "' 2>'" + (dir / "err").string() + "'";
    int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(dir / "out"), slurp(dir / "err")};
  }

  std::string data(const std::string& name) { return std::string(MORPHPIECE_DATA) + "/" + name; }

  void build(const std::filesystem::path& artifacts) {
    auto a = "--dir '" + artifacts.string() + "'";
    ASSERT_EQ(run("build-morphtable --source '" + data("mini_morphology.tsv") + "' --min-count 1 " + a).status, 0);
    ASSERT_EQ(run("train-bpe --corpus '" + data("mini_corpus.txt") + "' --vocab-size 1000 " + a).status, 0);
    ASSERT_EQ(run("build-vocab " + a).status, 0);
  }

  testing_support::TempDir dir;
};

}  // namespace

TEST_F(Cli, NoArgumentsPrintsUsage) {
  auto r = run("");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("encode --bogus").status, 1); }

TEST_F(Cli, SelftestPasses) {
  auto r = run("selftest");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, MissingArtifactsIsDataError) {
  EXPECT_EQ(run("encode --text batting --dir /nonexistent").status, 2);
  EXPECT_EQ(run("train-bpe --corpus /nonexistent/corpus.txt --dir /tmp").status, 2);
}

TEST_F(Cli, PipelineEncodeDecode) {
  auto artifacts = dir / "artifacts";
  build(artifacts);
  auto a = " --dir '" + artifacts.string() + "'";
  auto r = run("encode --text batting" + a);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "bat #ing\n");

  r = run("encode --emit trace --text 'batting zxqv'" + a);
  EXPECT_EQ(r.out, "MorphTable BpeSplit\n");

  r = run("encode --emit ids --text 'He was investigating diligently.'" + a);
  ASSERT_EQ(r.status, 0);
  std::ofstream(dir / "ids.txt") << r.out;
  r = run("decode --report-unverified --input '" + (dir / "ids.txt").string() + "'" + a);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "He was investigating diligently.\n");
  EXPECT_EQ(r.err, "unverified=0\n");

  r = run("decode --from tokens --text 'in# vestigate #ing'" + a);
  EXPECT_EQ(r.out, "investigating\n");
  EXPECT_EQ(run("decode --text '999999'" + a).status, 2);
}

TEST_F(Cli, ArtifactDirectoryFromEnvironment) {
  auto artifacts = dir / "env-artifacts";
  build(artifacts);
  auto r = run("encode --text decompress", "MORPHPIECE_DIR='" + artifacts.string() + "'");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "de# compress\n");
}

TEST_F(Cli, RebuildIsByteIdentical) {
  build(dir / "one");
  build(dir / "two");
  for (auto name : {"morphtable.tsv", "bpe.model", "bpe.vocab", "vocab.tsv"}) {
    EXPECT_EQ(slurp(dir / "one" / name), slurp(dir / "two" / name)) << name;
    EXPECT_FALSE(slurp(dir / "one" / name).empty()) << name;
  }
}

TEST_F(Cli, Stats) {
  auto artifacts = dir / "artifacts";
  build(artifacts);
  auto a = " --dir '" + artifacts.string() + "' --corpus '" + data("mini_corpus.txt") + "'";
  auto r = run("stats --tokenizers whitespace,character,morphpiece" + a);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("tokenizer\tdocuments\twords\ttokens\taverage_length\tfertility\nwhitespace\t", 0), 0u);
  EXPECT_NE(r.out.find("whitespace\t60\t542\t542\t9.033333\t1.000000"), std::string::npos) << r.out;

  auto plot = dir / "coverage.svg";
  r = run("stats --report coverage --format json --plot '" + plot.string() + "'" + a);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"report\": \"coverage\""), std::string::npos);
  EXPECT_EQ(slurp(plot).rfind("<svg", 0), 0u);

  auto out = dir / "unsplit.tsv";
  r = run("stats --report unsplit --top 2 --out '" + out.string() + "'" + a);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(slurp(out).rfind("rank\ttoken\tcount\trelative_frequency\n1\tthe\t60\t", 0), 0u) << slurp(out);

  EXPECT_EQ(run("stats --tokenizers nonsense" + a).status, 1);
  EXPECT_EQ(run("stats --tokenizers wordpiece:/nonexistent/vocab.txt" + a).status, 2);
}

TEST_F(Cli, BuildMorphtableReports) {
  auto r = run("build-morphtable --source '" + data("mini_morphology.tsv") + "' --min-count 2 --dir '" +
               (dir / "a").string() + "' --collisions '" + (dir / "collisions.tsv").string() + "'");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.err.find("full:"), std::string::npos);
  EXPECT_NE(r.err.find("trimmed:"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "morphtable.tsv"));
  EXPECT_EQ(run("build-morphtable --source '" + data("mini_morphology.tsv") + "' --min-count 0").status, 1);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtvm/cli.hpp"
#include "gtvm/corpus/corpus.hpp"
#include "gtvm/modelspace/snapshot.hpp"

using namespace gtvm;

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gtvm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_file(const std::string& name) { return std::string(GTVM_CORPUS_DIR) + "/" + name + ".vtcl"; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gtvm_cli_test_" + name)).string();
}

}  // namespace

TEST(Cli, RunHelloWorld) {
  auto r = invoke({"run", corpus_file("helloWorldASM")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("2.1 Hello World transformation started"), std::string::npos);
  EXPECT_NE(r.out.find("= Hello TTC Participants!"), std::string::npos) << r.out;
}

TEST(Cli, RunWithLibraryAndModel) {
  auto model = temp_path("triangle.gms");
  model::save_snapshot_file(corpus::build_fixture("triangle"), model);
  auto r = invoke({"run", corpus_file("graphPatterns"), corpus_file("countMatchesASM"), "--model", model, "--matcher",
                "ls"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find(" = 3\n"), std::string::npos) << r.out;
  std::filesystem::remove(model);
}

TEST(Cli, LoadErrors) {
  EXPECT_EQ(invoke({"run", "missing.vtcl"}).code, cli::kLoadError);
  EXPECT_EQ(invoke({"run", corpus_file("countMatchesASM")}).code, cli::kLoadError);
  EXPECT_EQ(invoke({"bogus"}).code, cli::kLoadError);
  EXPECT_EQ(invoke({"corpus", "run", "2.9", "asm"}).code, cli::kLoadError);

  auto bad = temp_path("bad.vtcl");
  std::ofstream(bad) << "machine m {\n  rule main() = seq {\n";
  auto r = invoke({"run", bad});
  EXPECT_EQ(r.code, cli::kLoadError);
  EXPECT_NE(r.err.find("bad.vtcl:"), std::string::npos) << r.err;
  std::filesystem::remove(bad);
}

TEST(Cli, RuntimeErrors) {
  auto f = temp_path("fail.vtcl");
  std::ofstream(f) << "import nemf.packages;\nmachine m {\n"
                      "pattern n(N) = { graph1.Node(N); }\n"
                      "rule main() = choose N with find n(N) do skip;\n}\n";
  EXPECT_EQ(invoke({"run", f}).code, cli::kRuntimeError);
  std::filesystem::remove(f);
}

TEST(Cli, Match) {
  auto model = temp_path("dangling.gms");
  model::save_snapshot_file(corpus::build_fixture("dangling"), model);
  auto r = invoke({"match", "--pattern", "graphPatterns.danglingEdge", "--model", model});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
  EXPECT_EQ(r.out.rfind("Edge=", 0), 0u) << r.out;

  EXPECT_EQ(invoke({"match", "--pattern", "graphPatterns.SimpleNode", "--count"}).out, "0\n");
  EXPECT_EQ(invoke({"match", "--pattern", "graphPatterns.transitiveConnected", "--model", model}).code,
            cli::kLoadError);
  EXPECT_EQ(invoke({"match", "--pattern", "graphPatterns.transitiveConnected", "--model", model, "--matcher", "ls",
                 "--count"})
                .out,
            "1\n");
  EXPECT_EQ(invoke({"match", "--pattern", "graphPatterns.nothing"}).code, cli::kLoadError);
  std::filesystem::remove(model);
}

TEST(Cli, CorpusRunAndDiff) {
  auto a = temp_path("a.gms"), b = temp_path("b.gms");
  EXPECT_EQ(invoke({"corpus", "run", "2.3", "asm", "--fixture", "chain4", "--out", a}).code, cli::kOk);
  EXPECT_EQ(invoke({"corpus", "run", "2.3", "asm", "--fixture", "chain4", "--out", b}).code, cli::kOk);
  auto d = invoke({"diff", a, b});
  EXPECT_EQ(d.code, cli::kOk) << d.out;
  EXPECT_EQ(d.out, "identical\n");

  EXPECT_EQ(invoke({"corpus", "run", "2.3", "asm", "--fixture", "triangle", "--out", b}).code, cli::kOk);
  EXPECT_EQ(invoke({"diff", a, b}).code, 1);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, CorpusListing) {
  auto r = invoke({"corpus", "list"});
  EXPECT_NE(r.out.find("graphPatterns\n"), std::string::npos);
  EXPECT_NE(invoke({"corpus", "tasks"}).out.find("2.4: copy=simpleMigration-fixed"), std::string::npos);
  EXPECT_EQ(invoke({"corpus", "show", "helloWorldGT"}).out, std::string(corpus::program_source("helloWorldGT")));
}

TEST(Cli, FixtureOutput) {
  auto r = invoke({"fixture", "k2"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, model::to_snapshot(corpus::build_fixture("k2")));
}

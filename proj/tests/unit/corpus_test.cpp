#include <gtest/gtest.h>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/modelspace/compare.hpp"
#include "gtvm/modelspace/snapshot.hpp"

using namespace gtvm;
namespace oracle = corpus::oracle;

namespace {

std::set<std::pair<std::string, std::string>> named(const model::ModelSpace& s, const oracle::Relation& r) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto [a, b] : r) out.emplace(s.name(a), s.name(b));
  return out;
}

}  // namespace

TEST(Fixtures, EmbeddedMatchesBuilt) {
  for (const auto& name : corpus::fixture_names()) {
    SCOPED_TRACE(name);
    EXPECT_TRUE(model::compare(corpus::build_fixture(name), corpus::load_fixture(name)).equal);
  }
}

TEST(Fixtures, UnknownName) {
  EXPECT_THROW(corpus::build_fixture("pentagon"), Error);
  EXPECT_THROW(corpus::build_fixture("random:3"), Error);
}

TEST(Fixtures, RandomIsDeterministic) {
  auto a = corpus::build_fixture("random:7:12:42:3");
  auto b = corpus::random_fixture({7, 12, 42, 3});
  EXPECT_EQ(model::to_snapshot(a), model::to_snapshot(b));
  EXPECT_NE(model::to_snapshot(a), model::to_snapshot(corpus::random_fixture({7, 12, 43, 3})));
  EXPECT_EQ(oracle::graph_view(a).edges.size(), 12u);
  EXPECT_EQ(oracle::counts(oracle::graph_view(a)).dangling, 3);
}

TEST(Oracle, CountsOnFixtures) {
  auto c = [](const char* n) { return oracle::counts(oracle::graph_view(corpus::build_fixture(n))); };
  EXPECT_EQ(c("triangle"), (oracle::Counts{3, 0, 0, 3, 0}));
  EXPECT_EQ(c("selfloops"), (oracle::Counts{3, 2, 0, 0, 0}));
  EXPECT_EQ(c("dangling"), (oracle::Counts{3, 0, 0, 0, 1}));
  EXPECT_EQ(c("isolated"), (oracle::Counts{4, 0, 2, 0, 0}));
  EXPECT_EQ(c("empty"), (oracle::Counts{}));
}

TEST(Oracle, ClosureAndTwoHop) {
  auto s = corpus::build_fixture("chain4");
  auto g = oracle::graph_view(s);
  auto r = oracle::edge_relation(g);
  EXPECT_EQ(named(s, oracle::closure_expected(g.nodes, r)),
            (std::set<std::pair<std::string, std::string>>{
                {"n1", "n2"}, {"n1", "n3"}, {"n1", "n4"}, {"n2", "n3"}, {"n2", "n4"}, {"n3", "n4"}}));
  EXPECT_EQ(named(s, oracle::two_hop_expected(r)),
            (std::set<std::pair<std::string, std::string>>{
                {"n1", "n2"}, {"n1", "n3"}, {"n2", "n3"}, {"n2", "n4"}, {"n3", "n4"}}));

  auto k = corpus::build_fixture("k2");
  auto kg = oracle::graph_view(k);
  auto kr = oracle::edge_relation(kg);
  // Reachability includes the diagonal on a cycle; the expected closure does not.
  EXPECT_EQ(oracle::warshall(kg.nodes, kr).size(), 4u);
  EXPECT_EQ(oracle::closure_expected(kg.nodes, kr).size(), 2u);
}

TEST(Tasks, VariantsAndPrograms) {
  EXPECT_EQ(corpus::task_variants("2.1"), (std::vector<std::string>{"asm", "gt"}));
  EXPECT_EQ(corpus::task_program("2.4", "copy"), "simpleMigration-fixed");
  EXPECT_EQ(corpus::task_program("2.6", "all-gt"), "transitiveEdgesAllGT");
  EXPECT_THROW(corpus::task_program("2.7", "asm"), Error);
  EXPECT_THROW(corpus::task_program("2.1", "rel"), Error);
}

TEST(Tasks, HelloWorld) {
  for (const char* v : {"asm", "gt"}) {
    auto r = corpus::run_task("2.1", v, model::ModelSpace(corpus::metamodels()));
    ASSERT_EQ(r.report.results.size(), 1u) << v;
    EXPECT_EQ(r.report.results[0].value, Value(std::string("Hello TTC Participants!"))) << v;
  }
}

TEST(Tasks, CountMatchesOnTriangle) {
  for (const char* v : {"asm", "mc"}) {
    auto r = corpus::run_task("2.2", v, corpus::build_fixture("triangle"));
    std::vector<Value> values;
    for (const auto& e : r.report.results) values.push_back(e.value);
    EXPECT_EQ(values, (std::vector<Value>{std::int64_t{3}, std::int64_t{0}, std::int64_t{0}, std::int64_t{3},
                                          std::int64_t{0}}))
        << v;
  }
}

TEST(Tasks, TransitiveAllOnChain) {
  auto r = corpus::run_task("2.6", "all-asm", corpus::build_fixture("chain4"));
  auto g = oracle::graph_view(r.space);
  EXPECT_EQ(named(r.space, oracle::edge_relation(g)),
            (std::set<std::pair<std::string, std::string>>{
                {"n1", "n2"}, {"n1", "n3"}, {"n1", "n4"}, {"n2", "n3"}, {"n2", "n4"}, {"n3", "n4"}}));
}

TEST(Tasks, MatchersAgreeOnFinalModels) {
  for (const char* task : {"2.2", "2.3", "2.5"}) {
    for (const auto& v : corpus::task_variants(task)) {
      SCOPED_TRACE(std::string(task) + " " + v);
      auto a = corpus::run_task(task, v, corpus::build_fixture("random:6:10:9:1"), rules::MatcherKind::Incremental);
      auto b = corpus::run_task(task, v, corpus::build_fixture("random:6:10:9:1"), rules::MatcherKind::LocalSearch);
      EXPECT_EQ(a.report.render(), b.report.render());
      EXPECT_TRUE(model::compare(a.space, b.space).equal);
    }
  }
}

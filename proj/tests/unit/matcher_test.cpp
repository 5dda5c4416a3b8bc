#include <gtest/gtest.h>

#include <algorithm>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/matcher_inc/rete.hpp"
#include "gtvm/matcher_ls/local_search.hpp"
#include "gtvm/vtcl/vtcl.hpp"

using namespace gtvm;

namespace {

rules::Program library(const model::TypeRegistry& types) { return corpus::load_programs({"graphPatterns"}, types); }

rules::Program inline_library(const std::string& patterns, const model::TypeRegistry& types) {
  auto m = vtcl::parse("import nemf.packages;\nimport nemf.ecore.datatypes;\nmachine t {\n" + patterns + "\n}\n");
  return vtcl::link({std::move(m)}, types);
}

std::vector<Tuple> sorted(std::vector<Tuple> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(LocalSearch, LibraryCountsOnFixtures) {
  auto s = corpus::build_fixture("triangle");
  auto p = library(s.types());
  ls::LocalSearchMatcher m(p.library, s);
  EXPECT_EQ(m.count("graphPatterns.SimpleNode"), 3u);
  EXPECT_EQ(m.count("graphPatterns.circleOfThreeNode"), 3u);
  EXPECT_EQ(m.count("graphPatterns.loopingEdge"), 0u);
  EXPECT_EQ(m.count("graphPatterns.edgeFromTo"), 3u);

  auto d = corpus::build_fixture("dangling");
  ls::LocalSearchMatcher md(p.library, d);
  EXPECT_EQ(md.count("graphPatterns.danglingEdge"), 1u);

  auto i = corpus::build_fixture("isolated");
  ls::LocalSearchMatcher mi(p.library, i);
  EXPECT_EQ(mi.count("graphPatterns.isolatedNode"), 2u);
}

TEST(LocalSearch, InjectivityUnlessShareable) {
  auto s = corpus::build_fixture("selfloops");
  auto p = library(s.types());
  ls::LocalSearchMatcher m(p.library, s);
  // edgeFromTo is shareable: loops n1->n1 and n2->n2 are matches.
  EXPECT_EQ(m.count("graphPatterns.edgeFromTo"), 4u);
  // edgeFromToInGraph is not: From and To must differ.
  EXPECT_EQ(m.count("graphPatterns.edgeFromToInGraph"), 2u);
  EXPECT_EQ(m.count("graphPatterns.loopingEdge"), 2u);
}

TEST(LocalSearch, PartialBinding) {
  auto s = corpus::build_fixture("chain4");
  auto p = library(s.types());
  ls::LocalSearchMatcher m(p.library, s);
  auto all = m.match_all("graphPatterns.edgeFromTo");
  ASSERT_EQ(all.size(), 3u);
  auto from = all[0][0];
  auto some = m.match_all("graphPatterns.edgeFromTo", {from, Value{}});
  ASSERT_EQ(some.size(), 1u);
  EXPECT_EQ(some[0], all[0]);
  EXPECT_TRUE(m.match_all("graphPatterns.edgeFromTo", {all[0][1], from}).empty());
}

TEST(LocalSearch, RecursivePatternTerminatesOnCycle) {
  auto s = corpus::build_fixture("cycle10");
  auto p = library(s.types());
  ls::LocalSearchMatcher m(p.library, s);
  // 10 * 9 ordered pairs minus the 10 adjacent ones, which need a direct edge.
  EXPECT_EQ(m.count("graphPatterns.transitiveConnected"), 80u);
  EXPECT_EQ(m.count("graphPatterns.transitiveEdgeMissing"), 80u);
  EXPECT_LT(m.last_steps(), ls::Options{}.step_budget);
}

TEST(LocalSearch, StepBudget) {
  auto s = corpus::build_fixture("cycle10");
  auto p = library(s.types());
  ls::LocalSearchMatcher m(p.library, s, ls::Options{50, std::nullopt});
  EXPECT_THROW(m.count("graphPatterns.transitiveConnected"), BudgetExceeded);
}

TEST(LocalSearch, ShuffledPlansAgree) {
  auto s = corpus::random_fixture({8, 16, 5, 2});
  auto p = library(s.types());
  ls::LocalSearchMatcher base(p.library, s);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ls::LocalSearchMatcher shuffled(p.library, s, ls::Options{50'000'000, seed});
    for (const auto& name : p.library.names())
      EXPECT_EQ(base.match_all(name), shuffled.match_all(name)) << name << " seed " << seed;
  }
}

TEST(LocalSearch, CheckErrorsCountAsFalse) {
  auto s = corpus::build_fixture("triangle");
  auto p = inline_library(
      "pattern named(N) = { graph1.Node(N); EString(S); graph1.Node.name(R, N, S); check(value(S) == \"n2\"); }\n"
      "pattern broken(N) = { graph1.Node(N); EString(S); graph1.Node.name(R, N, S); check(value(S) + 1 == 2); }",
      s.types());
  ls::LocalSearchMatcher m(p.library, s);
  EXPECT_EQ(m.count("t.named"), 1u);
  EXPECT_EQ(m.count("t.broken"), 0u);
}

TEST(LocalSearch, ContainmentIsTransitive) {
  auto s = corpus::build_fixture("triangle");
  auto p = inline_library(
      "pattern inGraph(G, S) = { graph1.Graph(G); EString(S) in G; }\n"
      "pattern atRoot(G) = { graph1.Graph(G) in nemf.resources; }",
      s.types());
  ls::LocalSearchMatcher m(p.library, s);
  EXPECT_EQ(m.count("t.inGraph"), 3u);
  EXPECT_EQ(m.count("t.atRoot"), 1u);
}

TEST(LocalSearch, MatchCounting) {
  auto s = corpus::build_fixture("isolated");
  auto p = inline_library("pattern n(N) = { graph1.Node(N); }\npattern c(K) = { find n(X) # K; }", s.types());
  ls::LocalSearchMatcher m(p.library, s);
  EXPECT_EQ(m.match_all("t.c"), (std::vector<Tuple>{{Value{std::int64_t{4}}}}));
}

TEST(Library, ValidationErrors) {
  auto types = corpus::metamodels();
  EXPECT_THROW(inline_library("pattern p(X, Y) = { graph1.Node(X); }", types), ValidationError);
  EXPECT_THROW(inline_library("pattern n(N) = { graph1.Node(N); }\npattern p(X) = { find n(X, X); }", types),
               ValidationError);
  EXPECT_THROW(inline_library("pattern p(X) = { graph1.Node(X); neg find p(X); }", types), ValidationError);
  EXPECT_THROW(inline_library("pattern p(X) = { graph1.Edge.src(X); }", types), ValidationError);
  EXPECT_NO_THROW(inline_library("pattern p(X) = { graph1.Node(X); neg find q(X); }\n"
                                 "pattern q(X) = { graph1.Node(X); graph1.Edge.src(R, E, X); }",
                                 types));
}

TEST(Library, RecursionFlags) {
  auto types = corpus::metamodels();
  auto p = library(types);
  EXPECT_TRUE(p.library.at("graphPatterns.transitiveConnected").recursive);
  EXPECT_TRUE(p.library.at("graphPatterns.transitiveEdgeMissing").needs_ls);
  EXPECT_FALSE(p.library.at("graphPatterns.transitiveEdgeMissing").recursive);
  EXPECT_FALSE(p.library.at("graphPatterns.transitiveEdgeMissing2hop").needs_ls);
}

TEST(Rete, RefusesRecursiveAndLocalSearchPatterns) {
  auto s = corpus::build_fixture("cycle10");
  auto p = library(s.types());
  rete::ReteNetwork net(p.library, s);
  try {
    net.register_pattern("graphPatterns.transitiveConnected");
    FAIL() << "expected refusal";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("use the local-search matcher"), std::string::npos);
  }
  EXPECT_THROW(net.register_pattern("graphPatterns.transitiveEdgeMissing"), ValidationError);
  EXPECT_NO_THROW(net.register_pattern("graphPatterns.transitiveEdgeMissing2hop"));
}

TEST(Rete, TracksMutations) {
  auto s = corpus::build_fixture("triangle");
  auto p = library(s.types());
  rete::ReteNetwork net(p.library, s);
  ls::LocalSearchMatcher lsm(p.library, s);
  auto dangling = net.register_pattern("graphPatterns.danglingEdge");
  auto circles = net.register_pattern("graphPatterns.circleOfThreeNode");
  EXPECT_EQ(net.count(dangling), 0u);
  EXPECT_EQ(net.count(circles), 3u);

  const auto cursor = net.cursor(dangling);
  ElementId n1{};
  for (auto n : s.elements_of_type(s.types().get("graph1.Node")))
    if (s.name(n) == "n1") n1 = n;
  s.remove(n1);
  EXPECT_EQ(net.count(dangling), 2u);
  EXPECT_EQ(net.count(circles), 0u);
  auto delta = net.delta_since(dangling, cursor);
  EXPECT_EQ(delta.appeared.size(), 2u);
  EXPECT_TRUE(delta.disappeared.empty());
  EXPECT_EQ(sorted(net.matches(dangling)), lsm.match_all("graphPatterns.danglingEdge"));
}

TEST(Rete, DeltaNetsOutFlips) {
  auto s = corpus::build_fixture("chain4");
  auto p = library(s.types());
  rete::ReteNetwork net(p.library, s);
  auto h = net.register_pattern("graphPatterns.edgeFromTo");
  const auto cursor = net.cursor(h);
  auto rel = s.elements_of_type(s.types().get("graph1.Edge.src")).at(0);
  s.remove_type(rel, s.types().get("graph1.Edge.src"));
  s.add_type(rel, s.types().get("graph1.Edge.src"));
  auto delta = net.delta_since(h, cursor);
  EXPECT_TRUE(delta.appeared.empty());
  EXPECT_TRUE(delta.disappeared.empty());
  EXPECT_EQ(net.count(h), 3u);
}

TEST(Rete, ResetMakesHandlesStale) {
  auto s = corpus::build_fixture("chain4");
  auto p = library(s.types());
  rete::ReteNetwork net(p.library, s);
  auto h = net.register_pattern("graphPatterns.Edge");
  net.reset();
  EXPECT_THROW(net.count(h), Error);
  auto again = net.register_pattern("graphPatterns.Edge");
  EXPECT_EQ(net.count(again), 3u);
}

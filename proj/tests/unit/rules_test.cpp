#include <gtest/gtest.h>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/vtcl/vtcl.hpp"

using namespace gtvm;

namespace {

struct Run {
  rules::ExecutionReport report;
  model::ModelSpace space;
};

Run run_source(const std::string& members, model::ModelSpace space = model::ModelSpace(corpus::metamodels()),
               rules::EngineOptions options = {}) {
  auto m = vtcl::parse("import nemf.packages;\nimport nemf.ecore.datatypes;\nmachine t {\n" + members + "\n}\n");
  std::vector<rules::Machine> machines{vtcl::parse(corpus::program_source("graphPatterns")), std::move(m)};
  auto program = vtcl::link(std::move(machines), space.types());
  rules::ExecutionReport report;
  {
    rules::Engine engine(program, space, options);
    report = engine.run("t");
  }
  return {std::move(report), std::move(space)};
}

std::vector<std::string> log_of(const std::string& members) { return run_source(members).report.log; }

}  // namespace

TEST(Engine, Builtins) {
  EXPECT_EQ(log_of("rule main() = seq { println(\"a\" + \"b\"); println(1 + 1); println(\"n\" + undef); }"),
            (std::vector<std::string>{"ab", "2", "nundef"}));
  EXPECT_EQ(log_of("rule main() = let X = undef in seq { new(EString(X)); println(value(X)); }"),
            std::vector<std::string>{"undef"});
  EXPECT_EQ(log_of("rule main() = if (1 == 1) println(\"y\"); else println(\"n\");"), std::vector<std::string>{"y"});
  EXPECT_THROW(log_of("rule main() = let X = undef in seq { new(EString(X)); println(X + 1); }"), RuntimeError);
}

TEST(Engine, MissingMain) { EXPECT_THROW(run_source("rule other() = skip;"), LinkError); }

TEST(Engine, ChooseFailureAndTry) {
  EXPECT_THROW(log_of("rule main() = choose N with find graphPatterns.SimpleNode(N) do skip;"), rules::RuleFailed);
  EXPECT_EQ(log_of("rule main() = seq { try choose N with find graphPatterns.SimpleNode(N) do println(\"x\"); "
                   "println(\"after\"); }"),
            std::vector<std::string>{"after"});
  // A failure inside a called rule aborts the caller unless a try encloses it.
  EXPECT_THROW(log_of("rule main() = call f();\n"
                      "rule f() = choose N with find graphPatterns.SimpleNode(N) do skip;"),
               rules::RuleFailed);
}

TEST(Engine, TryDoesNotSwallowRuntimeErrors) {
  EXPECT_THROW(log_of("rule main() = let X = undef in try seq { new(EString(X)); println(X + 1); }"), RuntimeError);
}

TEST(Engine, ForallSnapshot) {
  auto r = run_source(
      "rule main() = let C = 0 in seq {\n"
      "  forall N with find graphPatterns.SimpleNode(N) do let M = undef in seq {\n"
      "    new(graph1.Node(M));\n"
      "    update C = C + 1;\n"
      "  }\n"
      "  println(C);\n"
      "}",
      corpus::build_fixture("triangle"));
  EXPECT_EQ(r.report.log, std::vector<std::string>{"3"});
  EXPECT_EQ(r.space.elements_of_type(r.space.types().get("graph1.Node")).size(), 6u);
}

TEST(Engine, ForallSkipsInvalidatedMatches) {
  auto r = run_source(
      "rule main() = let C = 0 in seq {\n"
      "  forall E with find graphPatterns.Edge(E) do seq {\n"
      "    update C = C + 1;\n"
      "    forall F with find graphPatterns.Edge(F) do delete(F);\n"
      "  }\n"
      "  println(C);\n"
      "}",
      corpus::build_fixture("triangle"));
  EXPECT_EQ(r.report.log, std::vector<std::string>{"1"});
}

TEST(Engine, IterateBudget) {
  rules::EngineOptions options;
  options.iterate_budget = 5;
  EXPECT_THROW(run_source("rule main() = iterate choose N with find graphPatterns.SimpleNode(N) do skip;",
                          corpus::build_fixture("triangle"), options),
               BudgetExceeded);
  auto r = run_source("rule main() = let C = 0 in seq { "
                      "iterate choose N with find graphPatterns.SimpleNode(N) do seq { delete(N); update C = C + 1; } "
                      "println(C); }",
                      corpus::build_fixture("triangle"), options);
  EXPECT_EQ(r.report.log, std::vector<std::string>{"3"});
}

TEST(Engine, CallParameterModes) {
  EXPECT_EQ(log_of("rule main() = let A = 1, B = undef in seq { call f(A, B); println(A); println(value(B)); }\n"
                   "rule f(in X, out Y) = seq { new(EInt(Y)); setValue(Y, X + 41); }"),
            (std::vector<std::string>{"1", "42"}));
  EXPECT_THROW(log_of("rule main() = let B = undef in call f(B);\nrule f(out Y) = update Y = 1;"), ValidationError);
}

TEST(Engine, ValidationOfStatements) {
  EXPECT_THROW(run_source("rule main() = forall N with find graphPatterns.SimpleNode(N) do update N = 1;"),
               ValidationError);
  EXPECT_THROW(run_source("rule main() = println(Nope);"), ValidationError);
}

TEST(Engine, ResultsAndRender) {
  auto r = run_source(
      "rule main() = let R = undef, V = undef, Rel = undef in seq {\n"
      "  println(\"hi\");\n"
      "  new(result.IntResult(R) in nemf.resources);\n"
      "  new(EInt(V) in R);\n"
      "  new(result.IntResult.result(Rel, R, V));\n"
      "  rename(V, \"Answer\");\n"
      "  setValue(V, 42);\n"
      "}");
  ASSERT_EQ(r.report.results.size(), 1u);
  EXPECT_EQ(r.report.results[0].name, "Answer");
  EXPECT_EQ(r.report.render(), "hi\nAnswer = 42\n");
}

TEST(GtRules, ReverseKeepsRelationIds) {
  auto space = corpus::build_fixture("chain4");
  const auto before_src = space.elements_of_type(space.types().get("graph1.Edge.src"));
  auto result = corpus::run_task("2.3", "gt", std::move(space));
  const auto& s = result.space;
  EXPECT_EQ(s.elements_of_type(s.types().get("graph1.Edge.src")), before_src);
  auto g = corpus::oracle::graph_view(s);
  auto rel = corpus::oracle::edge_relation(g);
  std::set<std::pair<std::string, std::string>> named;
  for (auto [a, b] : rel) named.emplace(s.name(a), s.name(b));
  EXPECT_EQ(named, (std::set<std::pair<std::string, std::string>>{{"n2", "n1"}, {"n3", "n2"}, {"n4", "n3"}}));
}

TEST(GtRules, DeleteByNegativePostcondition) {
  auto result = corpus::run_task("2.5", "gt", corpus::build_fixture("triangle"));
  const auto& s = result.space;
  EXPECT_EQ(s.elements_of_type(s.types().get("graph1.Node")).size(), 2u);
  EXPECT_EQ(corpus::oracle::counts(corpus::oracle::graph_view(s)).dangling, 2);
}

TEST(GtRules, CreateWithAction) {
  auto result = corpus::run_task("2.1", "gt", model::ModelSpace(corpus::metamodels()));
  const auto& s = result.space;
  auto greetings = s.elements_of_type(s.types().get("helloworld.Greeting"));
  ASSERT_EQ(greetings.size(), 1u);
  auto texts = s.outgoing(greetings[0]);
  ASSERT_EQ(texts.size(), 1u);
  EXPECT_EQ(s.value(s.get(*texts.begin()).target), Value(std::string("Hello world")));
  EXPECT_EQ(s.parent(s.get(*texts.begin()).target), greetings[0]);
}

TEST(GtRules, ApplyReturnsParameters) {
  auto space = corpus::build_fixture("chain4");
  auto program = corpus::load_programs({"transitiveEdgesGT"}, space.types());
  rules::Engine engine(program, space);
  auto out = engine.apply("transitiveEdgesGT.insertTransitiveEdgesOnceGT", {Value{}, Value{}});
  ASSERT_TRUE(out);
  EXPECT_EQ(space.name(std::get<ElementId>((*out)[0])), "n1");
  EXPECT_EQ(space.name(std::get<ElementId>((*out)[1])), "n3");
}

TEST(GtRules, ConflictingCreationTypes) {
  EXPECT_THROW(run_source("gtrule g() = {\n"
                          "  precondition pattern e() = { neg find graphPatterns.SimpleNode(N); }\n"
                          "  postcondition pattern p(X) = { graph1.Node(X); graph1.Edge(X); }\n"
                          "}\n"
                          "rule main() = skip;"),
               ValidationError);
}

#include <gtest/gtest.h>

#include <algorithm>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/vtcl/vtcl.hpp"

using namespace gtvm;

namespace {

rules::Machine parse_named(const std::string& program) { return vtcl::parse(corpus::program_source(program)); }

std::string wrap(const std::string& members) { return "import nemf.packages;\nmachine m {\n" + members + "\n}\n"; }

}  // namespace

TEST(Vtcl, GraphPatternsLibrary) {
  auto m = parse_named("graphPatterns");
  EXPECT_EQ(m.name, "graphPatterns");
  EXPECT_EQ(m.patterns.size(), 25u);
  auto shareable = std::count_if(m.patterns.begin(), m.patterns.end(), [](const auto& p) { return p.shareable; });
  EXPECT_EQ(shareable, 3);
  auto localsearch = std::count_if(m.patterns.begin(), m.patterns.end(), [](const auto& p) { return p.localsearch; });
  EXPECT_EQ(localsearch, 2);
  EXPECT_EQ((std::vector<std::string>{"datatypes", "nemf.packages", "nemf.ecore.datatypes"}), m.imports);
}

TEST(Vtcl, OrBodies) {
  auto m = vtcl::parse(wrap("pattern p(X) = { graph1.Node(X); } or { graph1.Edge(X); }"));
  ASSERT_EQ(m.patterns.size(), 1u);
  EXPECT_EQ(m.patterns[0].bodies.size(), 2u);
}

TEST(Vtcl, AnnotationsAndEntryRule) {
  auto m = parse_named("helloWorldASM");
  EXPECT_EQ(m.annotations, std::vector<std::string>{"incremental"});
  EXPECT_NE(m.rule("main"), nullptr);
  EXPECT_EQ(m.rules.size(), 4u);
}

TEST(Vtcl, UnterminatedBlockIsPositioned) {
  try {
    vtcl::parse("machine m {\n  rule main() = seq {\n    skip;\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position().line, 4);
  }
}

TEST(Vtcl, SyntaxErrors) {
  EXPECT_THROW(vtcl::parse(wrap("rule main() = seq { skip }; }")), ParseError);
  EXPECT_THROW(vtcl::parse(wrap("@fancy pattern p(X) = { graph1.Node(X); }")), ParseError);
  EXPECT_THROW(vtcl::parse(wrap("rule main() = seq { println(\"open); }")), ParseError);
  EXPECT_THROW(vtcl::parse(wrap("rule main() = iterate skip;")), ParseError);
  EXPECT_THROW(vtcl::parse("machine m { rule main() = skip; } trailing"), ParseError);
}

TEST(Vtcl, DuplicateNames) {
  EXPECT_THROW(vtcl::parse(wrap("pattern p(X) = { graph1.Node(X); }\npattern p(X) = { graph1.Edge(X); }")),
               ParseError);
  EXPECT_THROW(vtcl::parse(wrap("rule a() = skip;\nrule a() = skip;")), ParseError);
}

TEST(Vtcl, Comments) {
  auto m = vtcl::parse("/* block\ncomment */ machine m { // line\n rule main() = skip; /* x */ }");
  EXPECT_EQ(m.rules.size(), 1u);
}

TEST(Vtcl, LinkResolvesLibraryReferences) {
  auto types = corpus::metamodels();
  auto p = vtcl::link({parse_named("graphPatterns"), parse_named("countMatchesASM")}, types);
  EXPECT_TRUE(p.rules.contains("countMatchesASM.countNodes"));
  EXPECT_EQ(p.rules.at("countMatchesASM.countNodes").name, "countMatchesASM.countNodes");
  EXPECT_TRUE(p.library.contains("graphPatterns.loopingEdge"));
  EXPECT_TRUE(p.library.contains("graphPatterns.transitiveConnected"));
}

TEST(Vtcl, LinkWithoutLibraryNamesMissingMachine) {
  auto types = corpus::metamodels();
  try {
    vtcl::link({parse_named("countMatchesASM")}, types);
    FAIL() << "expected a link error";
  } catch (const LinkError& e) {
    EXPECT_NE(std::string(e.what()).find("machine 'graphPatterns' is not loaded"), std::string::npos) << e.what();
  }
}

TEST(Vtcl, LinkSelfContained) {
  auto types = corpus::metamodels();
  EXPECT_NO_THROW(vtcl::link({parse_named("helloWorldASM")}, types));
  EXPECT_NO_THROW(vtcl::link({parse_named("helloWorldGT")}, types));
}

TEST(Vtcl, LinkErrors) {
  auto types = corpus::metamodels();
  auto link_one = [&](const std::string& members) { return vtcl::link({vtcl::parse(wrap(members))}, types); };
  EXPECT_THROW(link_one("pattern p(X) = { graph1.Nope(X); }"), ValidationError);
  EXPECT_THROW(link_one("rule main() = call nothing();"), LinkError);
  EXPECT_THROW(link_one("pattern p(X) = { find q(X); }"), LinkError);
  EXPECT_THROW(link_one("rule main() = update X = 1;"), ValidationError);
  EXPECT_THROW(link_one("pattern p(X) = { graph1.Node(X); find p(X); neg find p(X); }"), ValidationError);
  EXPECT_THROW(link_one("pattern q(X) = { graph1.Node(X); }\nrule main() = forall X with find q(X, Y) do skip;"),
               ValidationError);
  EXPECT_NO_THROW(link_one("pattern q(X) = { graph1.Node(X); }\nrule main() = forall X with find q(X) do skip;"));
}

TEST(Vtcl, CorpusParsesAndLinks) {
  auto types = corpus::metamodels();
  for (const auto& name : corpus::program_names()) {
    SCOPED_TRACE(name);
    EXPECT_NO_THROW(corpus::load_programs({name}, types));
  }
}

TEST(Vtcl, PrintParseRoundTrip) {
  for (const auto& name : corpus::program_names()) {
    SCOPED_TRACE(name);
    auto m = parse_named(name);
    auto text = vtcl::print(m);
    auto again = vtcl::parse(text);
    EXPECT_TRUE(again == m);
    EXPECT_EQ(vtcl::print(again), text);
  }
}

TEST(Vtcl, ExpressionPrinting) {
  auto m = vtcl::parse(wrap("rule main() = println(\"a\" + (\"b\" + 1) + \"q\\\"\\n\");"));
  auto text = vtcl::print(m);
  EXPECT_NE(text.find("println(\"a\" + (\"b\" + 1) + \"q\\\"\\n\");"), std::string::npos) << text;
}

#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/modelspace/compare.hpp"
#include "gtvm/modelspace/snapshot.hpp"

using namespace gtvm;
using model::ModelSpace;

namespace {

struct Types {
  explicit Types(const ModelSpace& s)
      : node(s.types().get("graph1.Node")),
        edge(s.types().get("graph1.Edge")),
        graph(s.types().get("graph1.Graph")),
        src(s.types().get("graph1.Edge.src")),
        trg(s.types().get("graph1.Edge.trg")),
        greeting(s.types().get("helloworld.Greeting")),
        gc(s.types().get("graph2.GraphComponent")),
        node2(s.types().get("graph2.Node")) {}
  TypeId node, edge, graph, src, trg, greeting, gc, node2;
};

}  // namespace

TEST(ModelSpace, NewEntityDefaultsToRoot) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto a = s.new_entity(t.greeting, kRootId);
  auto b = s.new_entity(t.node);
  EXPECT_EQ(s.parent(a), kRootId);
  EXPECT_EQ(s.parent(b), kRootId);
  EXPECT_GT(b, a);
  EXPECT_EQ(s.name(a), "e" + std::to_string(a.value));
}

TEST(ModelSpace, NewEntityErrors) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  EXPECT_THROW(s.new_entity(TypeId{9999}), ModelError);
  EXPECT_THROW(s.new_entity(t.src), ModelError);
  auto a = s.new_entity(t.node), b = s.new_entity(t.node);
  auto r = s.new_relation(t.src, a, b);
  EXPECT_THROW(s.new_entity(t.node, r), ModelError);
  s.remove(a);
  EXPECT_THROW(s.new_entity(t.node, a), ModelError);
}

TEST(ModelSpace, Relations) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto e = s.new_entity(t.edge), n = s.new_entity(t.node);
  auto r = s.new_relation(t.src, e, n);
  EXPECT_EQ(s.name(r), "r" + std::to_string(r.value));
  auto loop = s.new_relation(t.trg, n, n);
  EXPECT_EQ(s.get(loop).source, s.get(loop).target);
  EXPECT_THROW(s.new_relation(t.node, e, n), ModelError);
  s.remove(e);
  EXPECT_FALSE(s.is_live(r));
  EXPECT_THROW(s.new_relation(t.src, e, n), ModelError);
}

TEST(ModelSpace, DeleteLeavesNonContainedEdgesDangling) {
  auto s = corpus::build_fixture("triangle");
  Types t(s);
  ElementId n1{};
  for (auto n : s.elements_of_type(t.node))
    if (s.name(n) == "n1") n1 = n;
  const auto edges_before = s.elements_of_type(t.edge);
  s.remove(n1);
  EXPECT_FALSE(s.is_live(n1));
  EXPECT_EQ(s.elements_of_type(t.edge), edges_before);
  for (auto r : s.relations()) {
    EXPECT_NE(s.get(r).source, n1);
    EXPECT_NE(s.get(r).target, n1);
  }
  EXPECT_TRUE(s.audit().empty());
  auto counts = corpus::oracle::counts(corpus::oracle::graph_view(s));
  EXPECT_EQ(counts.dangling, 2);
}

TEST(ModelSpace, DeleteCascadesContainment) {
  auto s = corpus::build_fixture("triangle");
  Types t(s);
  auto graph = s.elements_of_type(t.graph).at(0);
  s.remove(graph);
  EXPECT_EQ(s.size(), 0u);
  EXPECT_THROW(s.remove(graph), ModelError);
}

TEST(ModelSpace, DeleteRelationOnly) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto e = s.new_entity(t.edge), n = s.new_entity(t.node);
  auto r = s.new_relation(t.src, e, n);
  EXPECT_EQ(s.relations_with_endpoint(n), std::vector<ElementId>{r});
  s.remove(r);
  EXPECT_TRUE(s.relations_with_endpoint(n).empty());
  EXPECT_TRUE(s.is_live(e));
  EXPECT_TRUE(s.is_live(n));
  EXPECT_EQ(s.size(), 2u);
}

TEST(ModelSpace, DeleteEventsChildrenFirst) {
  auto s = corpus::build_fixture("triangle");
  Types t(s);
  std::vector<ElementId> deleted;
  auto sub = s.subscribe([&](const model::ChangeEvent& ev) {
    if (const auto* d = std::get_if<model::ElementDeleted>(&ev)) deleted.push_back(d->element.id);
  });
  auto graph = s.elements_of_type(t.graph).at(0);
  const auto total = s.size();
  s.remove(graph);
  ASSERT_EQ(deleted.size(), total);
  EXPECT_EQ(deleted.back(), graph);
  std::set<ElementId> seen;
  for (auto id : deleted) EXPECT_TRUE(seen.insert(id).second);
}

// The removed set must be the least set closed under children and incident
// relations, computed here by a plain fixpoint over a copy of the space.
TEST(ModelSpace, DeleteClosureMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto s = corpus::random_fixture({6, 10, seed, 2});
    std::mt19937_64 rng(seed);
    auto all = s.all_elements();
    ElementId victim = all[rng() % all.size()];

    std::set<ElementId> closure{victim};
    for (bool grew = true; grew;) {
      grew = false;
      for (auto id : all) {
        if (closure.contains(id)) continue;
        const auto& el = s.get(id);
        bool in = (el.parent && closure.contains(*el.parent)) ||
                  (el.is_relation() && (closure.contains(el.source) || closure.contains(el.target)));
        if (in) grew = closure.insert(id).second;
      }
    }
    s.remove(victim);
    for (auto id : all) EXPECT_EQ(s.is_live(id), !closure.contains(id)) << "seed " << seed;
    EXPECT_TRUE(s.audit().empty());
  }
}

TEST(ModelSpace, Retyping) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto e = s.new_entity(t.edge), n = s.new_entity(t.node);
  auto r = s.new_relation(t.src, e, n);
  s.rename(r, "keep");
  const auto before = s.get(r);
  s.remove_type(r, t.src);
  s.add_type(r, t.trg);
  const auto& after = s.get(r);
  EXPECT_EQ(after.id, before.id);
  EXPECT_EQ(after.name, before.name);
  EXPECT_EQ(after.source, before.source);
  EXPECT_EQ(after.target, before.target);
  EXPECT_EQ(after.parent, before.parent);
  EXPECT_TRUE(s.conforms(r, t.trg));
  EXPECT_FALSE(s.conforms(r, t.src));
  EXPECT_THROW(s.remove_type(r, t.src), ModelError);
  EXPECT_THROW(s.add_type(r, t.node), ModelError);
  EXPECT_THROW(s.add_type(n, t.src), ModelError);
}

TEST(ModelSpace, InPlaceNodeMigration) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto n = s.new_entity(t.node);
  s.remove_type(n, t.node);
  s.add_type(n, t.node2);
  EXPECT_TRUE(s.conforms(n, t.gc));
  EXPECT_TRUE(s.elements_of_type(t.node).empty());
  EXPECT_EQ(s.elements_of_type(t.gc), std::vector<ElementId>{n});
  EXPECT_TRUE(s.elements_of_type(t.gc, false).empty());
}

TEST(ModelSpace, ValuesNamesEndpoints) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  auto text = s.new_entity(s.types().get("EString"));
  EXPECT_TRUE(is_undef(s.value(text)));
  s.set_value(text, std::string("Hello world"));
  EXPECT_EQ(s.value(text), Value(std::string("Hello world")));
  s.rename(text, "Number of nodes");
  EXPECT_EQ(s.name(text), "Number of nodes");

  auto e = s.new_entity(t.edge), a = s.new_entity(t.node), b = s.new_entity(t.node);
  auto r = s.new_relation(t.src, e, a);
  s.set_target(r, b);
  EXPECT_EQ(s.get(r).target, b);
  EXPECT_TRUE(s.incoming(a).empty());
  EXPECT_EQ(s.incoming(b), std::set<ElementId>{r});
  s.set_source(r, a);
  EXPECT_EQ(s.get(r).source, a);
  EXPECT_THROW(s.set_target(e, a), ModelError);
  s.remove(b);
  EXPECT_FALSE(s.is_live(r));
}

TEST(ModelSpace, Queries) {
  ModelSpace s(corpus::metamodels());
  Types t(s);
  EXPECT_TRUE(s.elements_of_type(t.node).empty());
  auto g = s.new_entity(t.graph);
  auto n = s.new_entity(t.node2, g);
  EXPECT_TRUE(s.conforms(n, t.gc));
  EXPECT_TRUE(s.contained_in(n, g));
  EXPECT_TRUE(s.contained_in(n, kRootId));
  EXPECT_FALSE(s.contained_in(g, n));
  EXPECT_EQ(s.children(g), std::set<ElementId>{n});
  EXPECT_THROW(s.name(ElementId{999}), ModelError);
}

TEST(ModelSpace, EventReplayReproducesSpace) {
  ModelSpace s(corpus::metamodels());
  std::vector<model::ChangeEvent> log;
  auto sub = s.subscribe([&](const model::ChangeEvent& ev) { log.push_back(ev); });
  {
    auto src = corpus::random_fixture({5, 8, 3, 2});
    // Rebuild the fixture in `s` through the public mutation API.
    std::map<ElementId, ElementId> map{{kRootId, kRootId}};
    for (auto id : src.all_elements()) {
      const auto& el = src.get(id);
      if (el.is_relation()) continue;
      auto types = el.types;
      auto n = s.new_entity(*types.begin(), map.at(*el.parent));
      map[id] = n;
      if (!is_undef(el.value)) s.set_value(n, el.value);
      s.rename(n, el.name);
    }
    for (auto id : src.relations()) {
      const auto& el = src.get(id);
      map[id] = s.new_relation(*el.types.begin(), map.at(el.source), map.at(el.target));
    }
  }
  Types t(s);
  auto rel = *s.relations().begin();
  auto node = s.elements_of_type(t.node).at(0);
  s.remove_type(node, t.node);
  s.add_type(node, t.node2);
  s.set_target(rel, node);
  s.remove(s.elements_of_type(t.edge).at(0));
  sub.reset();

  ModelSpace replay(corpus::metamodels());
  for (const auto& ev : log) replay.apply(ev);
  auto diff = model::compare(s, replay);
  EXPECT_TRUE(diff.equal) << (diff.differences.empty() ? "" : diff.differences[0]);
  EXPECT_EQ(replay.next_id(), s.next_id());
}

TEST(ModelSpace, SnapshotRoundTrip) {
  for (const auto& name : corpus::fixture_names()) {
    auto s = corpus::build_fixture(name);
    auto text = model::to_snapshot(s);
    auto back = model::from_snapshot(text, corpus::metamodels());
    EXPECT_TRUE(model::compare(s, back).equal) << name;
    EXPECT_EQ(model::to_snapshot(back), text) << name;
  }
}

TEST(ModelSpace, SnapshotTypesAndEscapes) {
  const std::string text =
      "type extra.Thing entity extends graph1.Node\n"
      "entity 3 : extra.Thing name=\"a \\\"b\\\"\\n\" value=-4\n"
      "entity 5 : EString in 3 value=\"x\\\\y\"\n"
      "relation 9 : graph1.Edge.src,graph1.Edge.trg (3 -> 5)\n";
  auto s = model::from_snapshot(text, corpus::metamodels());
  EXPECT_EQ(s.name(ElementId{3}), "a \"b\"\n");
  EXPECT_EQ(s.value(ElementId{3}), Value(std::int64_t{-4}));
  EXPECT_TRUE(s.conforms(ElementId{3}, s.types().get("graph1.Node")));
  EXPECT_EQ(s.get(ElementId{9}).types.size(), 2u);
  EXPECT_EQ(model::to_snapshot(model::from_snapshot(model::to_snapshot(s), corpus::metamodels())),
            model::to_snapshot(s));
  EXPECT_THROW(model::from_snapshot("entity x : graph1.Node\n", corpus::metamodels()), ParseError);
  EXPECT_THROW(model::from_snapshot("relation 2 : graph1.Edge.src (7 -> 8)\n", corpus::metamodels()), ParseError);
}

TEST(ModelSpace, CompareIgnoringIds) {
  auto a = corpus::build_fixture("triangle");
  // Same structure with every id shifted by 100.
  const std::string text = model::to_snapshot(a);
  const std::regex number(R"(\b\d+\b)");
  std::string shifted;
  auto it = std::sregex_iterator(text.begin(), text.end(), number);
  std::size_t last = 0;
  for (; it != std::sregex_iterator(); ++it) {
    shifted += text.substr(last, it->position() - last) + std::to_string(std::stoi(it->str()) + 100);
    last = it->position() + it->length();
  }
  shifted += text.substr(last);
  auto b = model::from_snapshot(shifted, corpus::metamodels());
  EXPECT_FALSE(model::compare(a, b).equal);
  EXPECT_TRUE(model::compare(a, b, {true, false}).equal);
  EXPECT_FALSE(model::compare(a, corpus::build_fixture("k2"), {true, false}).equal);

  b.set_value(b.elements_of_type(b.types().get("EString")).at(0), std::string("zz"));
  EXPECT_FALSE(model::compare(a, b, {true, false}).equal);
}

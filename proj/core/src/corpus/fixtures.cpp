#include <algorithm>
#include <charconv>
#include <random>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/corpus/embedded.hpp"
#include "gtvm/error.hpp"
#include "gtvm/modelspace/snapshot.hpp"

namespace gtvm::corpus {

namespace {

class GraphBuilder {
 public:
  GraphBuilder() : space_(metamodels()) {
    graph_ = space_.new_entity(type("graph1.Graph"));
    space_.rename(graph_, "g");
  }

  ElementId node(const std::string& name) {
    auto n = space_.new_entity(type("graph1.Node"), graph_);
    space_.rename(n, name);
    space_.new_relation(type("graph1.Graph.nodes"), graph_, n);
    auto text = space_.new_entity(type("EString"), n);
    space_.set_value(text, name);
    space_.new_relation(type("graph1.Node.name"), n, text);
    nodes_.push_back(n);
    return n;
  }

  void nodes(int count) {
    for (int i = 1; i <= count; ++i) node("n" + std::to_string(i));
  }

  // 1-based node indices; 0 leaves that end unconnected.
  ElementId edge(int from, int to) {
    auto e = space_.new_entity(type("graph1.Edge"), graph_);
    space_.rename(e, "edge" + std::to_string(++edges_));
    space_.new_relation(type("graph1.Graph.edges"), graph_, e);
    if (from) space_.new_relation(type("graph1.Edge.src"), e, nodes_.at(from - 1));
    if (to) space_.new_relation(type("graph1.Edge.trg"), e, nodes_.at(to - 1));
    return e;
  }

  model::ModelSpace take() { return std::move(space_); }

 private:
  TypeId type(const char* name) { return space_.types().get(name); }

  model::ModelSpace space_;
  ElementId graph_;
  std::vector<ElementId> nodes_;
  int edges_ = 0;
};

const std::vector<std::string> kFixtures = {"chain4", "cycle10", "dangling", "empty",
                                            "isolated", "k2", "selfloops", "triangle"};

int parse_int(std::string_view s, std::string_view whole) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v < 0)
    throw Error("malformed random fixture '" + std::string(whole) + "'");
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::string> fixture_names() { return kFixtures; }

model::ModelSpace random_fixture(const RandomSpec& spec) {
  if (spec.nodes <= 0 && spec.edges > 0) throw Error("random fixture needs nodes for its edges");
  GraphBuilder g;
  g.nodes(spec.nodes);
  std::mt19937_64 rng(spec.seed);
  auto pick = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(spec.nodes)) + 1; };
  for (int i = 0; i < spec.edges; ++i) {
    int from = pick(), to = pick();
    if (i < spec.dangling) (rng() & 1 ? from : to) = 0;
    g.edge(from, to);
  }
  return g.take();
}

model::ModelSpace build_fixture(std::string_view name) {
  if (name.starts_with("random:")) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 7;;) {
      auto colon = name.find(':', start);
      parts.push_back(name.substr(start, colon == std::string_view::npos ? colon : colon - start));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() < 3 || parts.size() > 4) throw Error("malformed random fixture '" + std::string(name) + "'");
    RandomSpec spec{parse_int(parts[0], name), parse_int(parts[1], name),
                    static_cast<std::uint64_t>(parse_int(parts[2], name)),
                    parts.size() == 4 ? parse_int(parts[3], name) : 0};
    return random_fixture(spec);
  }

  if (name == "empty") return model::ModelSpace(metamodels());
  GraphBuilder g;
  if (name == "triangle") {
    g.nodes(3);
    g.edge(1, 2);
    g.edge(2, 3);
    g.edge(3, 1);
  } else if (name == "chain4") {
    g.nodes(4);
    g.edge(1, 2);
    g.edge(2, 3);
    g.edge(3, 4);
  } else if (name == "selfloops") {
    g.nodes(3);
    g.edge(1, 1);
    g.edge(1, 2);
    g.edge(2, 2);
    g.edge(2, 3);
  } else if (name == "dangling") {
    g.nodes(3);
    g.edge(1, 2);
    g.edge(2, 3);
    g.edge(3, 0);
  } else if (name == "isolated") {
    g.nodes(4);
    g.edge(1, 2);
  } else if (name == "k2") {
    g.nodes(2);
    g.edge(1, 2);
    g.edge(2, 1);
  } else if (name == "cycle10") {
    g.nodes(10);
    for (int i = 1; i <= 10; ++i) g.edge(i, i % 10 + 1);
  } else {
    throw Error("unknown fixture '" + std::string(name) + "'");
  }
  return g.take();
}

model::ModelSpace load_fixture(std::string_view name) {
  if (name.starts_with("random:")) return build_fixture(name);
  for (const auto& f : embedded_fixtures())
    if (f.name == name) return model::from_snapshot(std::string(f.text), metamodels());
  throw Error("unknown fixture '" + std::string(name) + "'");
}

}  // namespace gtvm::corpus

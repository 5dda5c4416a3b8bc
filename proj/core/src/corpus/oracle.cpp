#include <algorithm>
#include <map>
#include <set>

#include "gtvm/corpus/corpus.hpp"

namespace gtvm::corpus::oracle {

GraphView graph_view(const model::ModelSpace& space, std::string_view package) {
  const auto& types = space.types();
  const std::string p(package);
  const TypeId node_t = types.get(p + ".Node"), edge_t = types.get(p + ".Edge");
  const TypeId src_t = types.get(p + ".Edge.src"), trg_t = types.get(p + ".Edge.trg");

  GraphView g;
  for (ElementId e : space.all_elements()) {
    const auto& el = space.get(e);
    if (el.kind != model::ElementKind::Entity) continue;
    if (space.conforms(e, node_t)) g.nodes.push_back(e);
    if (!space.conforms(e, edge_t)) continue;
    GraphView::Edge edge{e, {}, {}};
    for (ElementId r : space.outgoing(e)) {
      const auto& rel = space.get(r);
      if (!space.conforms(rel.target, node_t)) continue;
      if (space.conforms(r, src_t)) edge.sources.push_back(rel.target);
      if (space.conforms(r, trg_t)) edge.targets.push_back(rel.target);
    }
    std::sort(edge.sources.begin(), edge.sources.end());
    std::sort(edge.targets.begin(), edge.targets.end());
    g.edges.push_back(std::move(edge));
  }
  return g;
}

Relation edge_relation(const GraphView& g) {
  std::set<Pair> pairs;
  for (const auto& e : g.edges)
    for (ElementId s : e.sources)
      for (ElementId t : e.targets) pairs.emplace(s, t);
  return {pairs.begin(), pairs.end()};
}

Counts counts(const GraphView& g) {
  Counts c;
  c.nodes = static_cast<std::int64_t>(g.nodes.size());

  std::set<ElementId> touched;
  for (const auto& e : g.edges) {
    touched.insert(e.sources.begin(), e.sources.end());
    touched.insert(e.targets.begin(), e.targets.end());
    bool loop = std::any_of(e.sources.begin(), e.sources.end(), [&](ElementId s) {
      return std::find(e.targets.begin(), e.targets.end(), s) != e.targets.end();
    });
    if (loop) ++c.looping;
    if (e.sources.empty() != e.targets.empty()) ++c.dangling;
  }
  for (ElementId n : g.nodes)
    if (!touched.contains(n)) ++c.isolated;

  const Relation r = edge_relation(g);
  const std::set<Pair> has(r.begin(), r.end());
  for (ElementId a : g.nodes)
    for (ElementId b : g.nodes)
      for (ElementId x : g.nodes) {
        if (a == b || b == x || a == x) continue;
        if (has.contains({a, b}) && has.contains({b, x}) && has.contains({x, a})) ++c.circles_of_three;
      }
  return c;
}

Relation warshall(const std::vector<ElementId>& nodes, const Relation& r) {
  const std::size_t n = nodes.size();
  std::map<ElementId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[nodes[i]] = i;
  std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
  for (const auto& [a, b] : r) m[index.at(a)][index.at(b)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (m[k][j]) m[i][j] = 1;
  Relation out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m[i][j]) out.emplace_back(nodes[i], nodes[j]);
  std::sort(out.begin(), out.end());
  return out;
}

Relation closure_expected(const std::vector<ElementId>& nodes, const Relation& r) {
  std::set<Pair> out(r.begin(), r.end());
  for (const auto& p : warshall(nodes, r))
    if (p.first != p.second) out.insert(p);
  return {out.begin(), out.end()};
}

Relation two_hop_expected(const Relation& r) {
  std::set<Pair> out(r.begin(), r.end());
  for (const auto& [a, b] : r)
    for (const auto& [b2, c] : r)
      if (b == b2 && a != b && b != c && a != c) out.emplace(a, c);
  return {out.begin(), out.end()};
}

}  // namespace gtvm::corpus::oracle

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gtvm/modelspace/model_space.hpp"
#include "gtvm/rules/engine.hpp"
#include "gtvm/rules/program.hpp"

namespace gtvm::corpus {

/// The metamodels used by the task programs, all marked builtin.
model::TypeRegistry metamodels();

/// Names of the shipped programs (file names without `.vtcl`), sorted.
std::vector<std::string> program_names();
std::string_view program_source(std::string_view name);

/// Parses and links the named programs, prepending `graphPatterns` when a
/// program refers to it.
rules::Program load_programs(const std::vector<std::string>& names, const model::TypeRegistry& types);

// ---------------------------------------------------------------------------
// Fixtures

struct RandomSpec {
  int nodes = 10;
  int edges = 20;
  std::uint64_t seed = 1;
  /// Edges that get only one of their two endpoint relations.
  int dangling = 0;
};

/// Named graph1 fixtures that ship as `.gms` files.
std::vector<std::string> fixture_names();

/// Builds a fixture programmatically. Accepts the shipped names and
/// `random:<nodes>:<edges>:<seed>[:<dangling>]`.
model::ModelSpace build_fixture(std::string_view name);
model::ModelSpace random_fixture(const RandomSpec& spec);

/// Loads a shipped fixture from its embedded snapshot; random names are built.
model::ModelSpace load_fixture(std::string_view name);

// ---------------------------------------------------------------------------
// Tasks

struct TaskResult {
  rules::ExecutionReport report;
  model::ModelSpace space;
};

/// Task ids are "2.1" ... "2.6"; see `task_variants`.
const std::vector<std::string>& task_variants(std::string_view task);
std::string task_program(std::string_view task, std::string_view variant);

TaskResult run_task(std::string_view task, std::string_view variant, model::ModelSpace space,
                    rules::MatcherKind matcher = rules::MatcherKind::Incremental);

// ---------------------------------------------------------------------------
// Oracles. These read the model space directly and share no code with the
// matchers.

namespace oracle {

/// A graph1-style (or graph2-style) view: nodes, and per edge its optional
/// source and target.
struct GraphView {
  std::vector<ElementId> nodes;
  struct Edge {
    ElementId id;
    std::vector<ElementId> sources, targets;
  };
  std::vector<Edge> edges;
};

/// `package` is "graph1" or "graph2".
GraphView graph_view(const model::ModelSpace& space, std::string_view package = "graph1");

struct Counts {
  std::int64_t nodes = 0, looping = 0, isolated = 0, circles_of_three = 0, dangling = 0;
  friend bool operator==(const Counts&, const Counts&) = default;
};

Counts counts(const GraphView& g);

using Pair = std::pair<ElementId, ElementId>;
using Relation = std::vector<Pair>;  // sorted, unique

/// Pairs (source, target) of edges with both endpoints.
Relation edge_relation(const GraphView& g);

/// Reachability by Warshall's algorithm over the given node set.
Relation warshall(const std::vector<ElementId>& nodes, const Relation& r);

/// R plus every pair of distinct nodes where the second is reachable from the
/// first.
Relation closure_expected(const std::vector<ElementId>& nodes, const Relation& r);

/// R plus every pair (a, c), a != c, with a -> b -> c through a third node b.
Relation two_hop_expected(const Relation& r);

}  // namespace oracle

}  // namespace gtvm::corpus

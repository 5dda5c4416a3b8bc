#include <algorithm>
#include <map>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/corpus/embedded.hpp"
#include "gtvm/error.hpp"
#include "gtvm/vtcl/vtcl.hpp"

namespace gtvm::corpus {

using model::TypeKind;

model::TypeRegistry metamodels() {
  model::TypeRegistry r;
  const std::string pkg = "nemf.packages";
  auto entity = [&](const char* name, std::optional<TypeId> super = std::nullopt, std::string ns = {}) {
    return r.add(name, TypeKind::Entity, super, ns.empty() ? pkg : ns, true);
  };
  auto relation = [&](const char* name) { r.add(name, TypeKind::Relation, std::nullopt, pkg, true); };

  entity("EString", std::nullopt, "nemf.ecore.datatypes");
  entity("EInt", std::nullopt, "nemf.ecore.datatypes");

  entity("graph1.Graph");
  entity("graph1.Node");
  entity("graph1.Edge");
  relation("graph1.Graph.nodes");
  relation("graph1.Graph.edges");
  relation("graph1.Edge.src");
  relation("graph1.Edge.trg");
  relation("graph1.Node.name");

  entity("graph2.Graph");
  auto gc = entity("graph2.GraphComponent");
  entity("graph2.Node", gc);
  entity("graph2.Edge", gc);
  relation("graph2.Graph.gcs");
  relation("graph2.Edge.src");
  relation("graph2.Edge.trg");
  relation("graph2.GraphComponent.text");

  entity("graph3.Graph");
  entity("graph3.Node");
  relation("graph3.Graph.nodes");
  relation("graph3.Node.text");
  relation("graph3.Node.linksTo");

  entity("helloworld.Greeting");
  relation("helloworld.Greeting.text");

  entity("helloworldext.Greeting");
  entity("helloworldext.GreetingMessage");
  entity("helloworldext.Person");
  relation("helloworldext.Greeting.greetingMessage");
  relation("helloworldext.Greeting.person");
  relation("helloworldext.GreetingMessage.text");
  relation("helloworldext.Person.name");

  entity("result.StringResult");
  entity("result.IntResult");
  relation("result.StringResult.result");
  relation("result.IntResult.result");
  return r;
}

std::vector<std::string> program_names() {
  std::vector<std::string> out;
  for (const auto& f : embedded_programs()) out.emplace_back(f.name);
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view program_source(std::string_view name) {
  for (const auto& f : embedded_programs())
    if (f.name == name) return f.text;
  throw Error("unknown corpus program '" + std::string(name) + "'");
}

rules::Program load_programs(const std::vector<std::string>& names, const model::TypeRegistry& types) {
  std::vector<std::string> order;
  bool library = std::find(names.begin(), names.end(), "graphPatterns") != names.end();
  if (!library)
    for (const auto& n : names)
      if (program_source(n).find("graphPatterns.") != std::string_view::npos) {
        order.push_back("graphPatterns");
        break;
      }
  order.insert(order.end(), names.begin(), names.end());

  std::vector<rules::Machine> machines;
  for (const auto& n : order) machines.push_back(vtcl::parse(program_source(n)));
  return vtcl::link(std::move(machines), types);
}

namespace {

const std::map<std::string, std::vector<std::pair<std::string, std::string>>, std::less<>>& task_table() {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>, std::less<>> table = {
      {"2.1", {{"asm", "helloWorldASM"}, {"gt", "helloWorldGT"}}},
      {"2.2", {{"asm", "countMatchesASM"}, {"mc", "countMatchesMC"}}},
      {"2.3", {{"asm", "reverseEdgesASM"}, {"gt", "reverseEdgesGT"}, {"rel", "reverseEdgesRel"}}},
      {"2.4",
       {{"copy", "simpleMigration-fixed"},
        {"copy-verbatim", "simpleMigration"},
        {"inplace", "simpleMigrationInplace"},
        {"topo-copy", "simpleMigrationTopology"},
        {"topo-inplace", "simpleMigrationTopologyInplace"}}},
      {"2.5",
       {{"asm", "deleteNodeASM"},
        {"gt", "deleteNodeGT"},
        {"inc-asm", "deleteNodeIncidentASM"},
        {"inc-gt", "deleteNodeIncidentGT"}}},
      {"2.6",
       {{"once-asm", "transitiveEdgesASM"},
        {"once-gt", "transitiveEdgesGT"},
        {"iter-asm", "transitiveEdgesIterativeASM"},
        {"iter-gt", "transitiveEdgesIterativeGT"},
        {"all-asm", "transitiveEdgesAllASM"},
        {"all-gt", "transitiveEdgesAllGT"}}},
  };
  return table;
}

const std::vector<std::pair<std::string, std::string>>& task_entry(std::string_view task) {
  auto it = task_table().find(task);
  if (it == task_table().end()) throw Error("unknown task '" + std::string(task) + "'");
  return it->second;
}

}  // namespace

const std::vector<std::string>& task_variants(std::string_view task) {
  static std::map<std::string, std::vector<std::string>, std::less<>> cache;
  auto it = cache.find(task);
  if (it != cache.end()) return it->second;
  std::vector<std::string> v;
  for (const auto& [variant, _] : task_entry(task)) v.push_back(variant);
  return cache.emplace(std::string(task), std::move(v)).first->second;
}

std::string task_program(std::string_view task, std::string_view variant) {
  for (const auto& [v, program] : task_entry(task))
    if (v == variant) return program;
  throw Error("task " + std::string(task) + " has no variant '" + std::string(variant) + "'");
}

TaskResult run_task(std::string_view task, std::string_view variant, model::ModelSpace space,
                    rules::MatcherKind matcher) {
  auto program = load_programs({task_program(task, variant)}, space.types());
  auto options = rules::EngineOptions::from_env();
  options.matcher = matcher;
  rules::ExecutionReport report;
  {
    rules::Engine engine(program, space, options);
    report = engine.run(program.machines.back().name);
  }
  return TaskResult{std::move(report), std::move(space)};
}

}  // namespace gtvm::corpus

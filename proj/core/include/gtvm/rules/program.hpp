#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtvm/modelspace/change_event.hpp"
#include "gtvm/modelspace/type_registry.hpp"
#include "gtvm/patterns/library.hpp"
#include "gtvm/rules/ast.hpp"

namespace gtvm::rules {

/// An element the postcondition needs that the precondition did not bind.
struct GtCreate {
  std::string var;
  bool relation = false;
  std::optional<TypeId> type;            // absent only for untyped relations
  std::optional<std::string> container;  // entities; absent means the model root
  std::string src, trg;                  // relations
};

struct GtRetarget {
  std::string rel;
  model::RelationEnd end = model::RelationEnd::Target;
  std::string var;
};

/// A GT rule reduced to a precondition pattern plus the model edits that
/// turn a precondition match into a postcondition image.
struct CompiledGt {
  std::string name;  // qualified
  std::vector<Param> params;
  std::size_t pre = 0;  // library index of the precondition pattern
  std::vector<GtCreate> creates;    // containers before contents
  std::vector<GtRetarget> retargets;
  std::vector<std::string> deletes;
  std::vector<std::string> vars;  // bound once the rule has been applied
  std::optional<Stmt> action;
};

/// A linked set of machines: pattern and rule references are qualified
/// (`machine.name`), type references fully qualified, and the pattern
/// library is validated.
struct Program {
  std::vector<Machine> machines;  // as parsed
  pattern::PatternLibrary library;
  std::map<std::string, AsmRule> rules;
  std::map<std::string, CompiledGt> gtrules;

  const Machine* machine(std::string_view name) const;
};

/// Name under which a GT rule's precondition is registered in the library.
std::string precondition_name(const std::string& qualified_rule);

/// The library pattern standing for a rule's precondition: an inline pattern
/// widened so that every variable it binds is a parameter, or a shareable
/// wrapper around a `find`. Expects qualified references.
pattern::Pattern precondition_pattern(const GtRule& rule, const std::string& qualified_rule);

/// Derives the creation/retargeting/deletion plan. Expects qualified
/// references, fully qualified type names, and the precondition already
/// registered in the validated `library`.
CompiledGt compile_gt(const GtRule& rule, const std::string& qualified_rule, const pattern::PatternLibrary& library,
                      const model::TypeRegistry& types);

/// Scope checks for rule bodies: every variable declared, `update` only on
/// `let` variables, `new` only into `let` variables or parameters, call and
/// match targets present with matching arity.
void check_rule(const AsmRule& rule, const Program& program);
void check_action(const CompiledGt& gt, const Program& program);

}  // namespace gtvm::rules

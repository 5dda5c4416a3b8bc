#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gtvm/modelspace/type_registry.hpp"
#include "gtvm/rules/ast.hpp"
#include "gtvm/rules/program.hpp"

namespace gtvm::vtcl {

/// Parses one machine. Throws ParseError (with line and column) on syntax
/// errors and duplicate names.
rules::Machine parse(std::string_view source);

/// Canonical source text; parsing it yields a structurally equal machine.
std::string print(const rules::Machine& machine);
std::string print(const pattern::Expr& expr);

/// Resolves references across machines, registers and validates all
/// patterns and compiles GT rules. Throws LinkError for references to
/// machines or definitions that are not loaded, ValidationError otherwise.
rules::Program link(std::vector<rules::Machine> machines, const model::TypeRegistry& types);

}  // namespace gtvm::vtcl

#include "gtvm/rules/ast.hpp"

#include "gtvm/rules/program.hpp"

namespace gtvm::rules {

const AsmRule* Machine::rule(std::string_view n) const {
  for (const auto& r : rules)
    if (r.name == n) return &r;
  return nullptr;
}

const GtRule* Machine::gtrule(std::string_view n) const {
  for (const auto& r : gtrules)
    if (r.name == n) return &r;
  return nullptr;
}

const Machine* Program::machine(std::string_view name) const {
  for (const auto& m : machines)
    if (m.name == name) return &m;
  return nullptr;
}

}  // namespace gtvm::rules

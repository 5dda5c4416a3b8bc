#include <map>
#include <set>

#include "gtvm/overloaded.hpp"
#include "gtvm/vtcl/vtcl.hpp"

namespace gtvm::vtcl {

using namespace gtvm::rules;
using pattern::Pattern;

namespace {

std::string at(SourcePos pos) { return pos.line > 0 ? " (line " + std::to_string(pos.line) + ")" : ""; }

class Linker {
 public:
  Linker(std::vector<Machine> machines, const model::TypeRegistry& types) : types_(types) {
    program_.machines = std::move(machines);
  }

  Program run() {
    std::set<std::string> names;
    for (const auto& m : program_.machines) {
      if (!names.insert(m.name).second) throw LinkError("machine '" + m.name + "' is loaded twice");
      machines_.insert(m.name);
    }
    // Pass 1: every pattern name, so references can be checked before use.
    for (const auto& m : program_.machines) {
      for (const auto& p : m.patterns) {
        declare(m.name + "." + p.name, p.pos);
        for (const auto& b : p.bodies) declare_inline(b, m.name);
      }
      for (const auto& g : m.gtrules) {
        const std::string scope = m.name + "." + g.name;
        declare(precondition_name(scope), g.pos);
        for (const Condition* c : {&g.precondition, g.postcondition ? &*g.postcondition : nullptr})
          if (const auto* p = c ? std::get_if<Pattern>(c) : nullptr)
            for (const auto& b : p->bodies) declare_inline(b, scope);
      }
      for (const auto& r : m.rules) rule_names_.insert(m.name + "." + r.name);
      for (const auto& g : m.gtrules) gt_names_.insert(m.name + "." + g.name);
    }

    // Pass 2: qualified copies into the library.
    std::vector<std::pair<std::string, GtRule>> gts;
    for (const auto& m : program_.machines) {
      imports_ = &m.imports;
      machine_ = m.name;
      for (const auto& p : m.patterns) {
        Pattern q = p;
        q.name = m.name + "." + p.name;
        qualify(q, m.name);
        program_.library.add(std::move(q), m.imports);
      }
      for (const auto& g : m.gtrules) {
        const std::string scope = m.name + "." + g.name;
        GtRule q = g;
        qualify_condition(q.precondition, scope);
        if (q.postcondition) qualify_condition(*q.postcondition, scope);
        program_.library.add(precondition_pattern(q, scope), m.imports);
        if (q.action) qualify_stmt(*q.action, scope);
        gts.emplace_back(scope, std::move(q));
      }
      for (const auto& r : m.rules) {
        AsmRule q = r;
        q.name = m.name + "." + r.name;
        qualify_stmt(q.body, m.name);
        program_.rules.emplace(q.name, std::move(q));
      }
    }
    program_.library.validate(types_);

    for (const auto& [scope, g] : gts) program_.gtrules.emplace(scope, compile_gt(g, scope, program_.library, types_));
    for (const auto& [_, r] : program_.rules) check_rule(r, program_);
    for (const auto& [_, g] : program_.gtrules) check_action(g, program_);
    return std::move(program_);
  }

 private:
  void declare(const std::string& name, SourcePos pos) {
    if (!patterns_.insert(name).second) throw ValidationError("pattern '" + name + "' is defined twice" + at(pos));
  }

  void declare_inline(const pattern::PatternBody& b, const std::string& scope) {
    for (const auto& c : b.constraints)
      if (const auto* n = std::get_if<pattern::NegFind>(&c); n && n->inline_def) {
        declare(scope + "." + (*n->inline_def)->name, (*n->inline_def)->pos);
        for (const auto& ib : (*n->inline_def)->bodies) declare_inline(ib, scope);
      }
  }

  [[noreturn]] void unresolved(const std::string& what, const std::string& ref, SourcePos pos) const {
    auto dot = ref.find('.');
    if (dot != std::string::npos) {
      std::string m = ref.substr(0, dot);
      if (!machines_.contains(m))
        throw LinkError("unresolved " + what + " '" + ref + "'" + at(pos) + ": machine '" + m + "' is not loaded");
    }
    throw LinkError("unresolved " + what + " '" + ref + "' in machine '" + machine_ + "'" + at(pos));
  }

  // Innermost scope first: `machine.gtrule.name`, then `machine.name`, then
  // the reference as written (qualified by another machine).
  std::string resolve_pattern(const std::string& ref, const std::string& scope, SourcePos pos) const {
    for (std::string s = scope;; s = s.substr(0, s.rfind('.'))) {
      if (patterns_.contains(s + "." + ref)) return s + "." + ref;
      if (s.find('.') == std::string::npos) break;
    }
    if (patterns_.contains(ref)) return ref;
    unresolved("pattern", ref, pos);
  }

  std::string resolve_rule(const std::string& ref, const std::set<std::string>& table, const char* what,
                           SourcePos pos) const {
    if (table.contains(machine_ + "." + ref)) return machine_ + "." + ref;
    if (table.contains(ref)) return ref;
    unresolved(what, ref, pos);
  }

  std::string resolve_type(const std::string& ref, model::TypeKind kind, SourcePos pos) const {
    auto id = types_.resolve(ref, *imports_);
    if (!id) throw ValidationError("unknown type '" + ref + "' in machine '" + machine_ + "'" + at(pos));
    if (types_.info(*id).kind != kind)
      throw ValidationError("'" + ref + "' is not " +
                            (kind == model::TypeKind::Entity ? "an entity type" : "a relation type") + at(pos));
    return types_.qualified_name(*id);
  }

  void qualify(Pattern& p, const std::string& scope) {
    for (auto& b : p.bodies)
      for (auto& c : b.constraints) qualify_constraint(c, scope);
  }

  void qualify_constraint(pattern::Constraint& c, const std::string& scope) {
    std::visit(Overloaded{
                   [&](pattern::EntityType& e) { e.type.name = resolve_type(e.type.name, model::TypeKind::Entity, e.pos); },
                   [&](pattern::RelationTyped& r) {
                     r.type.name = resolve_type(r.type.name, model::TypeKind::Relation, r.pos);
                   },
                   [&](pattern::RelationAny&) {},
                   [&](pattern::FindCall& f) { f.pattern.name = resolve_pattern(f.pattern.name, scope, f.pos); },
                   [&](pattern::NegFind& n) {
                     if (n.inline_def) {
                       Pattern inner = **n.inline_def;
                       inner.name = scope + "." + inner.name;
                       n.pattern.name = inner.name;
                       qualify(inner, scope);
                       program_.library.add(inner, *imports_);
                       n.inline_def.reset();
                       return;
                     }
                     n.pattern.name = resolve_pattern(n.pattern.name, scope, n.pos);
                   },
                   [&](pattern::Check&) {},
                   [&](pattern::CountFind& cf) { cf.pattern.name = resolve_pattern(cf.pattern.name, scope, cf.pos); },
               },
               c);
  }

  void qualify_condition(Condition& c, const std::string& scope) {
    if (auto* f = std::get_if<pattern::FindCall>(&c)) {
      f->pattern.name = resolve_pattern(f->pattern.name, scope, f->pos);
      return;
    }
    qualify(std::get<Pattern>(c), scope);
  }

  void qualify_stmt(Stmt& s, const std::string& scope) {
    const SourcePos pos = s.pos;
    auto source = [&](MatchSource& m) {
      if (m.kind == MatchSource::Kind::Find)
        m.target = resolve_pattern(m.target, scope, pos);
      else
        m.target = resolve_rule(m.target, gt_names_, "gtrule", pos);
    };
    std::visit(Overloaded{
                   [&](Seq& q) {
                     for (auto& b : q.body) qualify_stmt(b, scope);
                   },
                   [&](Let& l) { qualify_stmt(*l.body, scope); },
                   [&](Update&) {},
                   [&](If& i) {
                     qualify_stmt(*i.then, scope);
                     if (i.otherwise) qualify_stmt(**i.otherwise, scope);
                   },
                   [&](Try& t) { qualify_stmt(*t.body, scope); },
                   [&](Choose& c) {
                     source(c.source);
                     qualify_stmt(*c.body, scope);
                   },
                   [&](Forall& f) {
                     source(f.source);
                     qualify_stmt(*f.body, scope);
                   },
                   [&](Iterate& it) { qualify_stmt(*it.body, scope); },
                   [&](Call& c) { c.rule = resolve_rule(c.rule, rule_names_, "rule", pos); },
                   [&](Println&) {},
                   [&](Skip&) {},
                   [&](NewEntity& n) { n.type.name = resolve_type(n.type.name, model::TypeKind::Entity, pos); },
                   [&](NewRelation& n) {
                     if (n.type) n.type->name = resolve_type(n.type->name, model::TypeKind::Relation, pos);
                   },
                   [&](NewInstanceOf& n) { n.type.name = any_type(n.type.name, pos); },
                   [&](Delete&) {},
                   [&](DeleteInstanceOf& d) { d.type.name = any_type(d.type.name, pos); },
                   [&](SetValue&) {},
                   [&](SetTo&) {},
                   [&](Rename&) {},
               },
               s.node);
  }

  std::string any_type(const std::string& ref, SourcePos pos) const {
    auto id = types_.resolve(ref, *imports_);
    if (!id) throw ValidationError("unknown type '" + ref + "' in machine '" + machine_ + "'" + at(pos));
    return types_.qualified_name(*id);
  }

  const model::TypeRegistry& types_;
  Program program_;
  std::set<std::string> machines_, patterns_, rule_names_, gt_names_;
  const std::vector<std::string>* imports_ = nullptr;
  std::string machine_;
};

}  // namespace

Program link(std::vector<Machine> machines, const model::TypeRegistry& types) {
  return Linker(std::move(machines), types).run();
}

}  // namespace gtvm::vtcl

#include <algorithm>
#include <map>
#include <set>

#include "gtvm/overloaded.hpp"
#include "gtvm/rules/program.hpp"

namespace gtvm::rules {

using pattern::Constraint;
using pattern::EntityType;
using pattern::FindCall;
using pattern::NegFind;
using pattern::Pattern;
using pattern::PatternBody;
using pattern::RelationAny;
using pattern::RelationTyped;

std::string precondition_name(const std::string& qualified_rule) { return qualified_rule + "#pre"; }

Pattern precondition_pattern(const GtRule& rule, const std::string& qualified_rule) {
  Pattern p;
  p.name = precondition_name(qualified_rule);
  p.pos = rule.pos;
  auto add_param = [&](const std::string& v) {
    if (std::find(p.params.begin(), p.params.end(), v) == p.params.end()) p.params.push_back(v);
  };
  if (const auto* f = std::get_if<FindCall>(&rule.precondition)) {
    // The callee decides about injectivity; the wrapper adds nothing.
    p.shareable = true;
    for (const auto& a : f->args) add_param(a);
    p.bodies.push_back(PatternBody{{*f}});
    return p;
  }
  const auto& src = std::get<Pattern>(rule.precondition);
  if (src.bodies.size() != 1)
    throw ValidationError("gtrule '" + qualified_rule + "': precondition must have exactly one body");
  p.shareable = src.shareable;
  p.localsearch = src.localsearch;
  p.params = src.params;
  p.bodies = src.bodies;
  for (const auto& c : src.bodies[0].constraints) {
    if (std::holds_alternative<NegFind>(c) || std::holds_alternative<pattern::Check>(c)) continue;
    if (const auto* cf = std::get_if<pattern::CountFind>(&c)) {
      add_param(cf->count_var);
      continue;
    }
    for (const auto& v : pattern::constraint_vars(c)) add_param(v);
  }
  return p;
}

namespace {

std::optional<std::string> subject_of(const Constraint& c) {
  if (const auto* e = std::get_if<EntityType>(&c)) return e->var;
  if (const auto* r = std::get_if<RelationTyped>(&c)) return r->rel;
  if (const auto* r = std::get_if<RelationAny>(&c)) return r->rel;
  return std::nullopt;
}

bool positive(const Constraint& c) {
  return !std::holds_alternative<NegFind>(c) && !std::holds_alternative<pattern::Check>(c);
}

struct Ends {
  std::string src, trg;
};

std::map<std::string, Ends> relation_ends(const PatternBody& body, const std::string& where) {
  std::map<std::string, Ends> out;
  for (const auto& c : body.constraints) {
    Ends e;
    std::string rel;
    if (const auto* r = std::get_if<RelationTyped>(&c)) {
      rel = r->rel;
      e = {r->src, r->trg};
    } else if (const auto* r = std::get_if<RelationAny>(&c)) {
      rel = r->rel;
      e = {r->src, r->trg};
    } else {
      continue;
    }
    auto [it, fresh] = out.emplace(rel, e);
    if (!fresh && (it->second.src != e.src || it->second.trg != e.trg))
      throw ValidationError(where + ": relation '" + rel + "' is given two different pairs of endpoints");
  }
  return out;
}

}  // namespace

CompiledGt compile_gt(const GtRule& rule, const std::string& qualified_rule, const pattern::PatternLibrary& library,
                      const model::TypeRegistry& types) {
  const std::string where = "gtrule '" + qualified_rule + "'";
  CompiledGt gt;
  gt.name = qualified_rule;
  gt.params = rule.params;
  gt.action = rule.action;
  gt.pre = library.index(precondition_name(qualified_rule));
  const auto& pre = library.at(gt.pre);

  std::set<std::string> known(pre.params.begin(), pre.params.end());
  for (const auto& p : rule.params)
    if (p.mode == ParamMode::In || p.mode == ParamMode::Unspecified) known.insert(p.name);

  if (rule.postcondition) {
    PatternBody post;
    if (const auto* f = std::get_if<FindCall>(&*rule.postcondition)) {
      post.constraints.push_back(*f);
    } else {
      const auto& p = std::get<Pattern>(*rule.postcondition);
      if (p.bodies.size() != 1) throw ValidationError(where + ": postcondition must have exactly one body");
      post = p.bodies[0];
    }
    const PatternBody flat_post = pattern::flatten(post, library, "post");
    const PatternBody flat_pre = pattern::flatten(library.source(gt.pre).bodies[0], library, "pre");

    std::set<std::string> post_vars, post_positive;
    for (const auto& c : flat_post.constraints) {
      for (const auto& v : pattern::constraint_vars(c)) {
        post_vars.insert(v);
        if (positive(c)) post_positive.insert(v);
      }
    }

    // (a) creation
    std::map<std::string, std::vector<TypeId>> entity_types, relation_types;
    std::map<std::string, std::string> containers;
    std::vector<std::string> order;  // first appearance
    auto note = [&](const std::string& v) {
      if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    };
    auto resolve = [&](const pattern::TypeRef& ref) {
      auto id = types.resolve(ref.name, {});
      if (!id) throw ValidationError(where + ": unknown type '" + ref.name + "'");
      return *id;
    };
    std::set<std::string> untyped_relations;
    for (const auto& c : flat_post.constraints) {
      if (const auto* e = std::get_if<EntityType>(&c)) {
        if (known.contains(e->var)) continue;
        note(e->var);
        entity_types[e->var].push_back(resolve(e->type));
        if (e->container && !pattern::is_namespace_name(*e->container)) {
          auto [it, fresh] = containers.emplace(e->var, *e->container);
          if (!fresh && it->second != *e->container)
            throw ValidationError(where + ": '" + e->var + "' is placed in two different containers");
        }
      } else if (const auto* r = std::get_if<RelationTyped>(&c)) {
        if (known.contains(r->rel)) continue;
        note(r->rel);
        relation_types[r->rel].push_back(resolve(r->type));
      } else if (const auto* r = std::get_if<RelationAny>(&c)) {
        if (known.contains(r->rel)) continue;
        note(r->rel);
        untyped_relations.insert(r->rel);
      }
    }
    const auto post_ends = relation_ends(flat_post, where);

    auto most_specific = [&](const std::string& v, const std::vector<TypeId>& ts) {
      for (TypeId t : ts)
        if (std::all_of(ts.begin(), ts.end(), [&](TypeId o) { return types.is_subtype(t, o); })) return t;
      throw ValidationError(where + ": cannot create '" + v + "' with conflicting types");
    };

    std::vector<GtCreate> entities, relations;
    for (const auto& v : order) {
      const bool is_entity = entity_types.contains(v);
      const bool is_relation = relation_types.contains(v) || untyped_relations.contains(v);
      if (is_entity && is_relation)
        throw ValidationError(where + ": '" + v + "' is used both as an entity and as a relation");
      GtCreate c;
      c.var = v;
      if (is_entity) {
        c.type = most_specific(v, entity_types[v]);
        if (auto it = containers.find(v); it != containers.end()) c.container = it->second;
        entities.push_back(c);
      } else {
        c.relation = true;
        if (relation_types.contains(v)) c.type = most_specific(v, relation_types[v]);
        const auto& e = post_ends.at(v);
        c.src = e.src;
        c.trg = e.trg;
        relations.push_back(c);
      }
    }

    // Containers first.
    std::set<std::string> available = known;
    while (!entities.empty()) {
      auto ready = std::find_if(entities.begin(), entities.end(), [&](const GtCreate& c) {
        return !c.container || available.contains(*c.container);
      });
      if (ready == entities.end())
        throw ValidationError(where + ": container of '" + entities.front().var + "' is neither bound nor created");
      available.insert(ready->var);
      gt.creates.push_back(*ready);
      entities.erase(ready);
    }
    for (const auto& r : relations) {
      for (const auto& end : {r.src, r.trg})
        if (!available.contains(end))
          throw ValidationError(where + ": endpoint '" + end + "' of '" + r.var + "' is neither bound nor created");
      gt.creates.push_back(r);
      available.insert(r.var);
    }
    for (const auto& c : flat_post.constraints) {
      if (!positive(c)) continue;
      for (const auto& v : pattern::constraint_vars(c)) {
        if (available.contains(v) || v.find('#') != std::string::npos) continue;
        if (std::holds_alternative<pattern::CountFind>(c) || std::holds_alternative<FindCall>(c))
          throw ValidationError(where + ": postcondition variable '" + v + "' cannot be created");
      }
    }

    // (c) retargeting
    const auto pre_ends = relation_ends(flat_pre, where);
    for (const auto& [rel, e] : post_ends) {
      if (!known.contains(rel)) continue;
      auto it = pre_ends.find(rel);
      if (it == pre_ends.end()) continue;
      if (it->second.src != e.src && available.contains(e.src))
        gt.retargets.push_back({rel, model::RelationEnd::Source, e.src});
      if (it->second.trg != e.trg && available.contains(e.trg))
        gt.retargets.push_back({rel, model::RelationEnd::Target, e.trg});
    }

    // (b) deletion of direct precondition subjects the postcondition drops
    auto add_delete = [&](const std::string& v) {
      if (std::find(gt.deletes.begin(), gt.deletes.end(), v) == gt.deletes.end()) gt.deletes.push_back(v);
    };
    for (const auto& c : library.source(gt.pre).bodies[0].constraints) {
      auto s = subject_of(c);
      if (s && known.contains(*s) && !post_vars.contains(*s)) add_delete(*s);
    }
    // (d) deletion of elements the postcondition forbids
    for (const auto& c : post.constraints) {
      const auto* n = std::get_if<NegFind>(&c);
      if (!n) continue;
      for (const auto& a : n->args)
        if (known.contains(a) && !post_positive.contains(a)) add_delete(a);
    }
    gt.vars.assign(available.begin(), available.end());
  } else {
    gt.vars.assign(known.begin(), known.end());
  }
  for (const auto& p : rule.params)
    if (std::find(gt.vars.begin(), gt.vars.end(), p.name) == gt.vars.end()) gt.vars.push_back(p.name);
  return gt;
}

}  // namespace gtvm::rules

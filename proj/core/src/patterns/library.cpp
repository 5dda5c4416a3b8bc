#include "gtvm/patterns/library.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "gtvm/overloaded.hpp"

namespace gtvm::pattern {

bool is_namespace_name(const std::string& container) { return container.find('.') != std::string::npos; }

std::vector<int> CConstraint::inputs(const std::vector<char>& local) const {
  std::vector<int> out;
  switch (op) {
    case Op::Type:
    case Op::In:
    case Op::Rel:
    case Op::RelAny:
    case Op::Find:
      break;
    case Op::Check:
      out = reads;
      break;
    case Op::Neg:
    case Op::Count:
      for (int v : args)
        if (!local[v]) out.push_back(v);
      break;
  }
  return out;
}

std::vector<int> CConstraint::outputs() const {
  switch (op) {
    case Op::Type: return {a};
    case Op::In: return {a, b};
    case Op::Rel:
    case Op::RelAny: return {a, b, c};
    case Op::Find: return args;
    case Op::Count: return {count_var};
    case Op::Neg:
    case Op::Check: return {};
  }
  return {};
}

std::vector<std::string> constraint_vars(const Constraint& c) {
  return std::visit(Overloaded{
                        [](const EntityType& t) {
                          std::vector<std::string> v{t.var};
                          if (t.container && !is_namespace_name(*t.container)) v.push_back(*t.container);
                          return v;
                        },
                        [](const RelationTyped& r) { return std::vector<std::string>{r.rel, r.src, r.trg}; },
                        [](const RelationAny& r) { return std::vector<std::string>{r.rel, r.src, r.trg}; },
                        [](const FindCall& f) { return f.args; },
                        [](const NegFind& n) { return n.args; },
                        [](const Check& ch) {
                          std::set<std::string> s;
                          collect_vars(ch.expr, s);
                          return std::vector<std::string>(s.begin(), s.end());
                        },
                        [](const CountFind& cf) {
                          auto v = cf.args;
                          v.push_back(cf.count_var);
                          return v;
                        },
                    },
                    c);
}

void PatternLibrary::add(Pattern p, std::vector<std::string> imports) {
  if (by_name_.contains(p.name)) throw ValidationError("duplicate pattern '" + p.name + "'");
  by_name_.emplace(p.name, sources_.size());
  sources_.push_back(std::move(p));
  imports_.push_back(std::move(imports));
  validated_ = false;
}

std::optional<std::size_t> PatternLibrary::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t PatternLibrary::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ValidationError("unknown pattern '" + std::string(name) + "'");
}

std::vector<std::string> PatternLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : by_name_) out.push_back(name);
  return out;
}

CBody PatternLibrary::compile_body(const Pattern& p, const PatternBody& body, std::size_t body_no,
                                   const std::vector<std::string>& imports, const model::TypeRegistry& types,
                                   bool require_bound_params) const {
  const std::string where = "pattern '" + p.name + "'" + (p.bodies.size() > 1 ? " body " + std::to_string(body_no + 1) : "");
  CBody out;
  auto own_var = [&](const std::string& name) {
    if (auto it = out.index.find(name); it != out.index.end()) return it->second;
    int idx = static_cast<int>(out.vars.size());
    out.vars.push_back(name);
    out.local.push_back(0);
    out.index.emplace(name, idx);
    return idx;
  };
  auto resolve_type = [&](const TypeRef& ref, model::TypeKind kind) {
    auto id = types.resolve(ref.name, imports);
    if (!id) throw ValidationError(where + ": unknown type '" + ref.name + "'");
    if (types.info(*id).kind != kind)
      throw ValidationError(where + ": '" + ref.name + "' is not " +
                            (kind == model::TypeKind::Entity ? "an entity type" : "a relation type"));
    return *id;
  };
  auto callee_of = [&](const PatternRef& ref, std::size_t nargs) {
    auto idx = find(ref.name);
    if (!idx) throw ValidationError(where + ": unknown pattern '" + ref.name + "'");
    if (sources_[*idx].params.size() != nargs)
      throw ValidationError(where + ": '" + ref.name + "' expects " + std::to_string(sources_[*idx].params.size()) +
                            " arguments, got " + std::to_string(nargs));
    return *idx;
  };

  for (const auto& param : p.params) {
    if (out.index.contains(param)) throw ValidationError(where + ": duplicate parameter '" + param + "'");
    own_var(param);
  }

  // Positive occurrences decide which variables belong to the body.
  std::set<std::string> positive;
  for (const auto& c : body.constraints) {
    if (std::holds_alternative<NegFind>(c) || std::holds_alternative<Check>(c)) continue;
    if (const auto* cf = std::get_if<CountFind>(&c)) {
      positive.insert(cf->count_var);
      continue;
    }
    for (const auto& v : constraint_vars(c)) positive.insert(v);
  }
  for (const auto& c : body.constraints) {
    if (std::holds_alternative<NegFind>(c) || std::holds_alternative<Check>(c)) continue;
    if (const auto* cf = std::get_if<CountFind>(&c)) {
      own_var(cf->count_var);
      continue;
    }
    for (const auto& v : constraint_vars(c)) own_var(v);
  }
  if (require_bound_params)
    for (const auto& param : p.params)
      if (!positive.contains(param))
        throw ValidationError(where + ": parameter '" + param + "' is not bound by a positive constraint");

  std::size_t scope = 0;
  auto args_of = [&](const std::vector<std::string>& names) {
    // Unbound names are existential and private to this one constraint.
    std::map<std::string, int> locals;
    std::vector<int> idx;
    for (const auto& n : names) {
      if (positive.contains(n) || (!require_bound_params && out.index.contains(n))) {
        idx.push_back(own_var(n));
        continue;
      }
      auto it = locals.find(n);
      if (it == locals.end()) {
        int v = static_cast<int>(out.vars.size());
        out.vars.push_back(n + "@" + std::to_string(scope));
        out.local.push_back(1);
        it = locals.emplace(n, v).first;
      }
      idx.push_back(it->second);
    }
    ++scope;
    return idx;
  };

  for (const auto& c : body.constraints) {
    std::visit(Overloaded{
                   [&](const EntityType& t) {
                     CConstraint cc;
                     cc.op = Op::Type;
                     cc.type = resolve_type(t.type, model::TypeKind::Entity);
                     cc.a = own_var(t.var);
                     out.constraints.push_back(cc);
                     if (t.container && !is_namespace_name(*t.container)) {
                       CConstraint in;
                       in.op = Op::In;
                       in.a = cc.a;
                       in.b = own_var(*t.container);
                       if (in.a == in.b) throw ValidationError(where + ": '" + t.var + "' cannot contain itself");
                       out.constraints.push_back(in);
                     }
                   },
                   [&](const RelationTyped& r) {
                     CConstraint cc;
                     cc.op = Op::Rel;
                     cc.type = resolve_type(r.type, model::TypeKind::Relation);
                     cc.a = own_var(r.rel);
                     cc.b = own_var(r.src);
                     cc.c = own_var(r.trg);
                     out.constraints.push_back(cc);
                   },
                   [&](const RelationAny& r) {
                     CConstraint cc;
                     cc.op = Op::RelAny;
                     cc.a = own_var(r.rel);
                     cc.b = own_var(r.src);
                     cc.c = own_var(r.trg);
                     out.constraints.push_back(cc);
                   },
                   [&](const FindCall& f) {
                     CConstraint cc;
                     cc.op = Op::Find;
                     cc.callee = callee_of(f.pattern, f.args.size());
                     for (const auto& a : f.args) cc.args.push_back(own_var(a));
                     out.constraints.push_back(cc);
                   },
                   [&](const NegFind& n) {
                     CConstraint cc;
                     cc.op = Op::Neg;
                     cc.callee = callee_of(n.pattern, n.args.size());
                     cc.args = args_of(n.args);
                     out.constraints.push_back(cc);
                   },
                   [&](const Check& ch) {
                     CConstraint cc;
                     cc.op = Op::Check;
                     cc.expr = ch.expr;
                     std::set<std::string> names;
                     collect_vars(ch.expr, names);
                     for (const auto& n : names) {
                       if (!positive.contains(n))
                         throw ValidationError(where + ": check reads '" + n + "', which no positive constraint binds");
                       cc.reads.push_back(own_var(n));
                     }
                     out.constraints.push_back(cc);
                   },
                   [&](const CountFind& cf) {
                     CConstraint cc;
                     cc.op = Op::Count;
                     cc.callee = callee_of(cf.pattern, cf.args.size());
                     cc.args = args_of(cf.args);
                     cc.count_var = own_var(cf.count_var);
                     out.constraints.push_back(cc);
                   },
               },
               c);
  }

  if (!p.shareable) {
    std::vector<int> group;
    for (std::size_t v = 0; v < out.vars.size(); ++v)
      if (!out.local[v] && positive.contains(out.vars[v])) group.push_back(static_cast<int>(v));
    if (group.size() > 1) out.distinct_groups.push_back(std::move(group));
  }
  return out;
}

CPattern PatternLibrary::compile_external(const Pattern& p, const std::vector<std::string>& imports,
                                          const model::TypeRegistry& types, bool require_bound_params) const {
  if (p.bodies.empty()) throw ValidationError("pattern '" + p.name + "' has no body");
  CPattern cp;
  cp.name = p.name;
  cp.params = p.params;
  cp.shareable = p.shareable;
  cp.localsearch = p.localsearch;
  for (std::size_t b = 0; b < p.bodies.size(); ++b)
    cp.bodies.push_back(compile_body(p, p.bodies[b], b, imports, types, require_bound_params));
  return cp;
}

void PatternLibrary::validate(const model::TypeRegistry& types) {
  compiled_.clear();
  sccs_.clear();
  for (std::size_t i = 0; i < sources_.size(); ++i) compiled_.push_back(compile_external(sources_[i], imports_[i], types, true));

  // Tarjan over the call graph; components come out callees-first.
  const std::size_t n = sources_.size();
  std::vector<std::vector<std::pair<std::size_t, bool>>> edges(n);  // (callee, negative)
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& body : compiled_[i].bodies)
      for (const auto& c : body.constraints)
        if (c.op == Op::Find || c.op == Op::Neg || c.op == Op::Count) edges[i].push_back({c.callee, c.op != Op::Find});

  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (auto [w, _] : edges[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        compiled_[w].scc = sccs_.size();
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      sccs_.push_back(std::move(comp));
    }
  };
  for (std::size_t i = 0; i < n; ++i)
    if (index[i] < 0) strong(i);

  for (const auto& comp : sccs_) {
    bool cyclic = comp.size() > 1;
    for (std::size_t v : comp)
      for (auto [w, _] : edges[v])
        if (w == v) cyclic = true;
    if (!cyclic) continue;
    bool annotated = false;
    for (std::size_t v : comp) {
      compiled_[v].recursive = true;
      annotated = annotated || sources_[v].localsearch;
      for (auto [w, negative] : edges[v])
        if (negative && compiled_[w].scc == compiled_[v].scc)
          throw ValidationError("pattern '" + sources_[v].name +
                                "': negation or counting inside a recursive cycle is not supported");
    }
    if (!annotated) throw ValidationError("pattern '" + sources_[comp.front()].name + "': recursive pattern requires local search");
  }

  // Components are already in callee-first order.
  for (const auto& comp : sccs_) {
    bool ls = false;
    for (std::size_t v : comp) {
      ls = ls || compiled_[v].recursive || sources_[v].localsearch;
      for (auto [w, _] : edges[v]) ls = ls || compiled_[w].needs_ls;
    }
    for (std::size_t v : comp) compiled_[v].needs_ls = ls;
  }
  validated_ = true;
}

namespace {

struct Flattener {
  const PatternLibrary& lib;
  std::string prefix;
  int counter = 0;

  void inline_into(const PatternBody& body, const std::function<std::string(const std::string&)>& rename,
                   std::vector<Constraint>& out, std::set<std::string>& active) {
    for (const auto& c : body.constraints) {
      if (const auto* f = std::get_if<FindCall>(&c)) {
        auto idx = lib.find(f->pattern.name);
        if (idx && lib.source(*idx).bodies.size() == 1 && !active.contains(f->pattern.name)) {
          const Pattern& callee = lib.source(*idx);
          std::map<std::string, std::string> sub;
          for (std::size_t i = 0; i < callee.params.size(); ++i) sub[callee.params[i]] = rename(f->args[i]);
          const std::string tag = prefix + "#" + std::to_string(counter++) + "#";
          auto inner = [&, tag](const std::string& v) {
            auto it = sub.find(v);
            return it != sub.end() ? it->second : tag + v;
          };
          active.insert(f->pattern.name);
          inline_into(callee.bodies[0], inner, out, active);
          active.erase(f->pattern.name);
          continue;
        }
      }
      out.push_back(rename_constraint(c, rename));
    }
  }

  static Constraint rename_constraint(Constraint c, const std::function<std::string(const std::string&)>& f) {
    std::visit(Overloaded{
                   [&](EntityType& t) {
                     t.var = f(t.var);
                     if (t.container && !is_namespace_name(*t.container)) t.container = f(*t.container);
                   },
                   [&](RelationTyped& r) {
                     r.rel = f(r.rel);
                     r.src = f(r.src);
                     r.trg = f(r.trg);
                   },
                   [&](RelationAny& r) {
                     r.rel = f(r.rel);
                     r.src = f(r.src);
                     r.trg = f(r.trg);
                   },
                   [&](FindCall& fc) {
                     for (auto& a : fc.args) a = f(a);
                   },
                   [&](NegFind& n) {
                     for (auto& a : n.args) a = f(a);
                   },
                   [&](Check& ch) { rename_vars(ch.expr, f); },
                   [&](CountFind& cf) {
                     for (auto& a : cf.args) a = f(a);
                     cf.count_var = f(cf.count_var);
                   },
               },
               c);
    return c;
  }
};

}  // namespace

PatternBody flatten(const PatternBody& body, const PatternLibrary& library, const std::string& prefix) {
  Flattener fl{library, prefix};
  PatternBody out;
  std::set<std::string> active;
  fl.inline_into(body, [](const std::string& v) { return v; }, out.constraints, active);
  return out;
}

}  // namespace gtvm::pattern

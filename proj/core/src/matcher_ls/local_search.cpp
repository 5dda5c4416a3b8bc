#include "gtvm/matcher_ls/local_search.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "gtvm/error.hpp"

namespace gtvm::ls {

using pattern::CBody;
using pattern::CConstraint;
using pattern::CPattern;
using pattern::Op;

namespace {

using TupleSet = std::set<Tuple>;

bool deferred(Op op) { return op == Op::Neg || op == Op::Check || op == Op::Count; }

bool all_bound(const std::vector<int>& vars, const std::vector<char>& bound) {
  return std::all_of(vars.begin(), vars.end(), [&](int v) { return bound[v] != 0; });
}

// A callee tuple agrees with the caller's argument list if bound arguments
// match and repeated unbound arguments receive equal values.
bool agrees(const Tuple& t, const std::vector<int>& args, const std::vector<Value>& binding) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Value& b = binding[args[i]];
    if (!is_undef(b)) {
      if (t[i] != b) return false;
      continue;
    }
    for (std::size_t j = 0; j < i; ++j)
      if (args[j] == args[i] && t[j] != t[i]) return false;
  }
  return true;
}

}  // namespace

struct LocalSearchMatcher::Context {
  explicit Context(LocalSearchMatcher& owner) : m(owner) {}

  LocalSearchMatcher& m;
  std::uint64_t steps = 0;
  std::map<std::tuple<std::size_t, std::size_t, std::vector<char>>, std::vector<PlanStep>> plans;
  std::map<std::pair<std::size_t, Tuple>, std::vector<Tuple>> memo;
  std::map<std::size_t, std::vector<TupleSet>> tables;  // by SCC, indexed like scc_members

  void tick() {
    if (++steps > m.options_.step_budget)
      throw BudgetExceeded("local search exceeded its step budget of " + std::to_string(m.options_.step_budget));
  }

  const std::vector<Tuple>& call(std::size_t callee, const Tuple& partial) {
    auto key = std::make_pair(callee, partial);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Tuple> result;
    const CPattern& cp = m.lib_.at(callee);
    if (cp.recursive) {
      const auto& table = recursive_table(callee);
      for (const Tuple& t : table) {
        bool ok = true;
        for (std::size_t i = 0; i < partial.size() && ok; ++i) ok = is_undef(partial[i]) || partial[i] == t[i];
        if (ok) result.push_back(t);
      }
    } else {
      TupleSet out;
      for (std::size_t b = 0; b < cp.bodies.size(); ++b) eval_body(callee, b, partial, nullptr, out);
      result.assign(out.begin(), out.end());
    }
    return memo.emplace(std::move(key), std::move(result)).first->second;
  }

  const TupleSet& recursive_table(std::size_t p) {
    const CPattern& cp = m.lib_.at(p);
    const auto& members = m.lib_.scc_members(p);
    auto slot = [&](std::size_t q) {
      return static_cast<std::size_t>(std::find(members.begin(), members.end(), q) - members.begin());
    };
    auto it = tables.find(cp.scc);
    if (it == tables.end()) {
      std::vector<TupleSet> full(members.size()), delta(members.size());
      const Tuple unbound;
      // Base round: recursive calls see empty tables.
      for (std::size_t i = 0; i < members.size(); ++i) {
        const CPattern& q = m.lib_.at(members[i]);
        std::vector<const TupleSet*> src;
        for (std::size_t b = 0; b < q.bodies.size(); ++b) {
          src.assign(q.bodies[b].constraints.size(), nullptr);
          for (std::size_t c = 0; c < src.size(); ++c) {
            const auto& cc = q.bodies[b].constraints[c];
            if (cc.op == Op::Find && m.lib_.at(cc.callee).scc == cp.scc) src[c] = &full[slot(cc.callee)];
          }
          eval_body(members[i], b, unbound, &src, delta[i]);
        }
      }
      for (std::size_t i = 0; i < members.size(); ++i) full[i] = delta[i];
      // Semi-naive rounds: one recursive occurrence reads the delta.
      while (std::any_of(delta.begin(), delta.end(), [](const TupleSet& d) { return !d.empty(); })) {
        std::vector<TupleSet> fresh(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
          const CPattern& q = m.lib_.at(members[i]);
          for (std::size_t b = 0; b < q.bodies.size(); ++b) {
            const auto& cs = q.bodies[b].constraints;
            for (std::size_t j = 0; j < cs.size(); ++j) {
              if (cs[j].op != Op::Find || m.lib_.at(cs[j].callee).scc != cp.scc) continue;
              std::vector<const TupleSet*> src(cs.size(), nullptr);
              for (std::size_t c = 0; c < cs.size(); ++c)
                if (cs[c].op == Op::Find && m.lib_.at(cs[c].callee).scc == cp.scc)
                  src[c] = c == j ? &delta[slot(cs[c].callee)] : &full[slot(cs[c].callee)];
              TupleSet found;
              eval_body(members[i], b, unbound, &src, found);
              for (auto& t : found)
                if (!full[i].contains(t)) fresh[i].insert(t);
            }
          }
        }
        for (std::size_t i = 0; i < members.size(); ++i) full[i].insert(fresh[i].begin(), fresh[i].end());
        delta = std::move(fresh);
      }
      it = tables.emplace(cp.scc, std::move(full)).first;
    }
    return it->second[slot(p)];
  }

  void eval_body(std::size_t p, std::size_t b, const Tuple& partial, const std::vector<const TupleSet*>* src,
                 TupleSet& out) {
    const CPattern& cp = m.lib_.at(p);
    const CBody& body = cp.bodies[b];
    std::vector<Value> binding(body.vars.size());
    std::vector<char> bound(body.vars.size(), 0);
    for (std::size_t i = 0; i < partial.size(); ++i) {
      if (is_undef(partial[i])) continue;
      binding[i] = partial[i];
      bound[i] = 1;
    }
    // Injectivity among the pre-bound parameters.
    for (std::size_t i = 0; i < partial.size(); ++i)
      if (bound[i] && !distinct_ok(body, binding, static_cast<int>(i))) return;
    const std::vector<PlanStep>* steps;
    std::vector<PlanStep> shuffled;
    if (m.options_.shuffle_seed) {
      shuffled = m.plan(p, b, bound);
      steps = &shuffled;
    } else {
      auto key = std::make_tuple(p, b, bound);
      auto it = plans.find(key);
      if (it == plans.end()) it = plans.emplace(key, m.plan(p, b, bound)).first;
      steps = &it->second;
    }
    run(cp, body, *steps, 0, binding, src, out);
  }

  static bool distinct_ok(const CBody& body, const std::vector<Value>& binding, int v) {
    const Value& x = binding[v];
    if (!is_element(x)) return true;
    for (const auto& g : body.distinct_groups) {
      if (std::find(g.begin(), g.end(), v) == g.end()) continue;
      for (int u : g)
        if (u != v && binding[u] == x) return false;
    }
    return true;
  }

  // Binds `v` to `x` (or checks it when already bound) and continues.
  template <class F>
  void bind(const CBody& body, std::vector<Value>& binding, int v, const Value& x, F&& next) {
    if (!is_undef(binding[v])) {
      if (binding[v] == x) next();
      return;
    }
    binding[v] = x;
    if (distinct_ok(body, binding, v)) next();
    binding[v] = Value{};
  }

  void run(const CPattern& cp, const CBody& body, const std::vector<PlanStep>& plan, std::size_t k,
           std::vector<Value>& binding, const std::vector<const TupleSet*>* src, TupleSet& out) {
    if (k == plan.size()) {
      out.insert(Tuple(binding.begin(), binding.begin() + static_cast<std::ptrdiff_t>(cp.arity())));
      return;
    }
    const CConstraint& c = body.constraints[plan[k].constraint];
    const auto& space = m.space_;
    auto next = [&] { run(cp, body, plan, k + 1, binding, src, out); };
    auto elem = [&](int v) -> std::optional<ElementId> {
      if (const auto* id = std::get_if<ElementId>(&binding[v])) return *id;
      return std::nullopt;
    };
    switch (c.op) {
      case Op::Type: {
        if (!is_undef(binding[c.a])) {
          tick();
          auto id = elem(c.a);
          if (id && space.is_live(*id) && space.conforms(*id, c.type)) next();
          return;
        }
        for (ElementId id : space.elements_of_type(c.type)) {
          tick();
          bind(body, binding, c.a, id, next);
        }
        return;
      }
      case Op::In: {
        auto child = elem(c.a);
        auto container = elem(c.b);
        if (!is_undef(binding[c.a]) && !child) return;
        if (!is_undef(binding[c.b]) && !container) return;
        if (child) {
          for (auto p = space.parent(*child); p && *p != kRootId; p = space.parent(*p)) {
            tick();
            bind(body, binding, c.b, *p, next);
          }
          return;
        }
        if (container) {
          std::vector<ElementId> todo(space.children(*container).begin(), space.children(*container).end());
          while (!todo.empty()) {
            ElementId x = todo.back();
            todo.pop_back();
            tick();
            bind(body, binding, c.a, x, next);
            for (ElementId ch : space.children(x)) todo.push_back(ch);
          }
          return;
        }
        for (ElementId x : space.all_elements()) {
          if (space.get(x).is_relation()) continue;
          for (auto p = space.parent(x); p && *p != kRootId; p = space.parent(*p)) {
            tick();
            bind(body, binding, c.a, x, [&] { bind(body, binding, c.b, *p, next); });
          }
        }
        return;
      }
      case Op::Rel:
      case Op::RelAny: {
        const bool typed = c.op == Op::Rel;
        auto try_rel = [&](ElementId r) {
          tick();
          const auto& e = space.get(r);
          if (!e.is_relation() || (typed && !space.conforms(r, c.type))) return;
          bind(body, binding, c.a, r, [&] {
            bind(body, binding, c.b, e.source, [&] { bind(body, binding, c.c, e.target, next); });
          });
        };
        if (!is_undef(binding[c.a])) {
          auto r = elem(c.a);
          if (r && space.is_live(*r)) try_rel(*r);
          return;
        }
        if (!is_undef(binding[c.b])) {
          auto s = elem(c.b);
          if (!s || !space.is_live(*s)) return;
          for (ElementId r : std::vector<ElementId>(space.outgoing(*s).begin(), space.outgoing(*s).end())) try_rel(r);
          return;
        }
        if (!is_undef(binding[c.c])) {
          auto t = elem(c.c);
          if (!t || !space.is_live(*t)) return;
          for (ElementId r : std::vector<ElementId>(space.incoming(*t).begin(), space.incoming(*t).end())) try_rel(r);
          return;
        }
        if (typed) {
          for (ElementId r : space.elements_of_type(c.type)) try_rel(r);
        } else {
          for (ElementId r : std::vector<ElementId>(space.relations().begin(), space.relations().end())) try_rel(r);
        }
        return;
      }
      case Op::Find: {
        Tuple partial(c.args.size());
        for (std::size_t i = 0; i < c.args.size(); ++i) partial[i] = binding[c.args[i]];
        const std::vector<Tuple>* rows;
        std::vector<Tuple> filtered;
        if (src && (*src)[plan[k].constraint]) {
          for (const Tuple& t : *(*src)[plan[k].constraint])
            if (agrees(t, c.args, binding)) filtered.push_back(t);
          rows = &filtered;
        } else {
          rows = &call(c.callee, partial);
        }
        for (const Tuple& t : *rows) {
          tick();
          if (!agrees(t, c.args, binding)) continue;
          bind_args(body, binding, c.args, t, 0, next);
        }
        return;
      }
      case Op::Neg: {
        tick();
        if (matching_rows(c, binding) == 0) next();
        return;
      }
      case Op::Count: {
        tick();
        bind(body, binding, c.count_var, Value{static_cast<std::int64_t>(matching_rows(c, binding))}, next);
        return;
      }
      case Op::Check: {
        tick();
        auto lookup = [&](const std::string& name) -> Value { return binding[body.index.at(name)]; };
        bool pass = false;
        try {
          pass = pattern::truthy(pattern::evaluate(c.expr, lookup, space));
        } catch (const RuntimeError&) {
          // A check that cannot be evaluated does not hold.
        }
        if (pass) next();
        return;
      }
    }
  }

  template <class F>
  void bind_args(const CBody& body, std::vector<Value>& binding, const std::vector<int>& args, const Tuple& t,
                 std::size_t i, F&& next) {
    if (i == args.size()) {
      next();
      return;
    }
    bind(body, binding, args[i], t[i], [&] { bind_args(body, binding, args, t, i + 1, next); });
  }

  std::size_t matching_rows(const CConstraint& c, const std::vector<Value>& binding) {
    Tuple partial(c.args.size());
    for (std::size_t i = 0; i < c.args.size(); ++i) partial[i] = binding[c.args[i]];
    std::size_t n = 0;
    for (const Tuple& t : call(c.callee, partial))
      if (agrees(t, c.args, binding)) ++n;
    return n;
  }
};

LocalSearchMatcher::LocalSearchMatcher(const pattern::PatternLibrary& library, const model::ModelSpace& space,
                                       Options options)
    : lib_(library), space_(space), options_(options) {
  if (options_.shuffle_seed) rng_.seed(*options_.shuffle_seed);
  if (!lib_.validated()) throw ValidationError("pattern library must be validated before matching");
}

std::vector<PlanStep> LocalSearchMatcher::plan(std::size_t p, std::size_t b, const std::vector<char>& bound_in) {
  const CBody& body = lib_.at(p).bodies.at(b);
  std::vector<char> bound = bound_in;
  bound.resize(body.vars.size(), 0);
  std::vector<std::size_t> remaining(body.constraints.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<PlanStep> out;

  auto cost = [&](const CConstraint& c) -> double {
    auto b_ = [&](int v) { return bound[v] != 0; };
    switch (c.op) {
      case Op::Type:
        return b_(c.a) ? 0 : static_cast<double>(space_.count_of_type(c.type)) + 1;
      case Op::In:
        if (b_(c.a) && b_(c.b)) return 0;
        if (b_(c.a)) return 2;
        if (b_(c.b)) return 10;
        return static_cast<double>(space_.size()) * 4 + 1000;
      case Op::Rel:
      case Op::RelAny:
        if (b_(c.a)) return 0.5;
        if (b_(c.b) || b_(c.c)) return 2;
        return c.op == Op::Rel ? static_cast<double>(space_.count_of_type(c.type)) + 1
                               : static_cast<double>(space_.relations().size()) + 1;
      case Op::Find: {
        std::size_t nb = std::count_if(c.args.begin(), c.args.end(), b_);
        if (nb == c.args.size()) return 0.5;
        double base = lib_.at(c.callee).recursive ? 500 : 50;
        return nb > 0 ? base / 10 : base;
      }
      default:
        return std::numeric_limits<double>::infinity();
    }
  };

  while (!remaining.empty()) {
    std::vector<std::size_t> legal;
    for (std::size_t i : remaining) {
      const auto& c = body.constraints[i];
      if (deferred(c.op) && !all_bound(c.inputs(body.local), bound)) continue;
      legal.push_back(i);
    }
    if (legal.empty()) throw ValidationError("no executable search plan for pattern '" + lib_.at(p).name + "'");
    std::size_t pick;
    if (options_.shuffle_seed) {
      pick = legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng_)];
    } else {
      bool positives_left = std::any_of(remaining.begin(), remaining.end(),
                                        [&](std::size_t i) { return !deferred(body.constraints[i].op); });
      pick = legal.front();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : legal) {
        const auto& c = body.constraints[i];
        if (deferred(c.op)) {
          if (!positives_left) {
            pick = i;
            break;
          }
          continue;
        }
        double w = cost(c);
        if (w < best) {
          best = w;
          pick = i;
        }
      }
    }
    const auto& c = body.constraints[pick];
    auto outs = c.outputs();
    bool filter = all_bound(c.inputs(body.local), bound) &&
                  std::all_of(outs.begin(), outs.end(), [&](int v) { return bound[v] != 0; });
    out.push_back(PlanStep{pick, c.op, filter});
    for (int v : outs) bound[v] = 1;
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
  }
  return out;
}

std::vector<Tuple> LocalSearchMatcher::match_all(std::size_t p, const Tuple& binding) {
  const CPattern& cp = lib_.at(p);
  Tuple partial = binding.empty() ? Tuple(cp.arity()) : binding;
  if (partial.size() != cp.arity())
    throw Error("pattern '" + cp.name + "' takes " + std::to_string(cp.arity()) + " arguments, got " +
                std::to_string(partial.size()));
  for (const auto& v : partial)
    if (const auto* id = std::get_if<ElementId>(&v); id && !space_.is_live(*id))
      throw ModelError("binding for '" + cp.name + "' refers to deleted element " + std::to_string(id->value));
  Context ctx(*this);
  std::vector<Tuple> out;
  try {
    out = ctx.call(p, partial);
  } catch (...) {
    last_steps_ = ctx.steps;
    throw;
  }
  last_steps_ = ctx.steps;
  return out;
}

std::vector<Tuple> LocalSearchMatcher::match_all(std::string_view pattern, const Tuple& binding) {
  return match_all(lib_.index(pattern), binding);
}

std::optional<Tuple> LocalSearchMatcher::match_one(std::string_view pattern, const Tuple& binding) {
  auto all = match_all(pattern, binding);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::size_t LocalSearchMatcher::count(std::string_view pattern, const Tuple& binding) {
  return match_all(pattern, binding).size();
}

}  // namespace gtvm::ls

#include "gtvm/rules/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "gtvm/overloaded.hpp"

namespace gtvm::rules {

EngineOptions EngineOptions::from_env() {
  EngineOptions o;
  if (const char* s = std::getenv("GTVM_STEP_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0') o.iterate_budget = v;
  }
  return o;
}

std::string ExecutionReport::render() const {
  std::ostringstream os;
  for (const auto& line : log) os << line << '\n';
  for (const auto& r : results) os << r.name << " = " << to_display(r.value) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

Matcher::Matcher(const pattern::PatternLibrary& library, model::ModelSpace& space, MatcherKind kind,
                 ls::Options options)
    : lib_(library), space_(space), kind_(kind), ls_(library, space, options) {}

Matcher::~Matcher() = default;

bool Matcher::incremental(std::size_t pattern) const {
  return kind_ == MatcherKind::Incremental && rete::ReteNetwork::supports(lib_, pattern);
}

std::vector<Tuple> Matcher::match_all(std::size_t pattern, const Tuple& binding) {
  if (!incremental(pattern)) return ls_.match_all(pattern, binding);
  for (const auto& v : binding)
    if (const auto* id = std::get_if<ElementId>(&v); id && !space_.is_live(*id))
      throw ModelError("binding refers to deleted element " + to_literal(v));
  if (!rete_) rete_ = std::make_unique<rete::ReteNetwork>(lib_, space_);
  auto it = handles_.find(pattern);
  if (it == handles_.end()) it = handles_.emplace(pattern, rete_->register_pattern(pattern)).first;
  std::vector<Tuple> out;
  for (auto& t : rete_->matches(it->second)) {
    bool ok = true;
    for (std::size_t i = 0; i < binding.size() && ok; ++i) ok = is_undef(binding[i]) || binding[i] == t[i];
    if (ok) out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

class Engine::Env {
 public:
  void push() { scopes_.emplace_back(); }
  void pop() { scopes_.pop_back(); }
  void declare(const std::string& name, Value v) { scopes_.back()[name] = std::move(v); }

  const Value* find(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return &f->second;
    return nullptr;
  }
  const Value& get(const std::string& name) const {
    if (const Value* v = find(name)) return *v;
    throw RuntimeError("unknown variable '" + name + "'");
  }
  void set(const std::string& name, Value v) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) {
        f->second = std::move(v);
        return;
      }
    throw RuntimeError("unknown variable '" + name + "'");
  }

  // Opens a scope for the lifetime of the guard.
  class Guard {
   public:
    explicit Guard(Env& env) : env_(env) { env_.push(); }
    ~Guard() { env_.pop(); }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    Env& env_;
  };

 private:
  std::vector<std::map<std::string, Value>> scopes_;
};

Engine::Engine(const Program& program, model::ModelSpace& space, EngineOptions options)
    : program_(program),
      space_(space),
      options_(options),
      matcher_(std::make_unique<Matcher>(program.library, space, options.matcher, options.local_search)) {}

Engine::~Engine() = default;

void Engine::say(const std::string& line) {
  if (report_) report_->log.push_back(line);
  if (options_.echo) *options_.echo << line << '\n';
}

ExecutionReport Engine::run(std::string_view machine) {
  const std::string main = std::string(machine) + ".main";
  auto it = program_.rules.find(main);
  if (it == program_.rules.end()) throw LinkError("machine '" + std::string(machine) + "' has no main rule");
  if (!it->second.params.empty()) throw LinkError("'" + main + "' must not take parameters");

  ExecutionReport report;
  report_ = &report;
  const ElementId first_new = space_.next_id();
  try {
    Env env;
    env.push();
    exec(it->second.body, env);
  } catch (const RuleFailed& e) {
    report_ = nullptr;
    throw RuleFailed(std::string("uncaught rule failure: ") + e.what());
  } catch (...) {
    report_ = nullptr;
    throw;
  }
  report_ = nullptr;

  const auto& reg = space_.types();
  for (const char* kind : {"result.IntResult", "result.StringResult"}) {
    auto owner_type = reg.find(kind);
    auto rel_type = reg.find(std::string(kind) + ".result");
    if (!owner_type || !rel_type) continue;
    for (ElementId owner : space_.elements_of_type(*owner_type)) {
      if (owner < first_new) continue;
      for (ElementId r : space_.outgoing(owner)) {
        if (!space_.conforms(r, *rel_type)) continue;
        ElementId v = space_.get(r).target;
        report.results.push_back({owner, v, space_.name(v), space_.value(v)});
      }
    }
  }
  std::sort(report.results.begin(), report.results.end(),
            [](const ResultEntry& a, const ResultEntry& b) { return a.owner < b.owner; });
  return report;
}

TypeId Engine::type(const TypeRef& ref) const {
  auto id = space_.types().resolve(ref.name, {});
  if (!id) throw RuntimeError("unknown type '" + ref.name + "'");
  return *id;
}

Value Engine::eval(const Expr& e, Env& env) const {
  return pattern::evaluate(e, [&](const std::string& n) { return env.get(n); }, space_);
}

ElementId Engine::element(const std::string& var, Env& env, const char* what) const {
  const Value& v = env.get(var);
  const auto* id = std::get_if<ElementId>(&v);
  if (!id) throw RuntimeError(std::string(what) + ": '" + var + "' holds " + to_literal(v) + ", not a model element");
  if (!space_.is_live(*id)) throw RuntimeError(std::string(what) + ": '" + var + "' refers to a deleted element");
  return *id;
}

void Engine::exec(const Stmt& s, Env& env) {
  std::visit(
      Overloaded{
          [&](const Seq& q) {
            for (const auto& b : q.body) exec(b, env);
          },
          [&](const Let& l) {
            Env::Guard g(env);
            for (const auto& v : l.vars) env.declare(v.name, eval(v.init, env));
            exec(*l.body, env);
          },
          [&](const Update& u) { env.set(u.var, eval(u.value, env)); },
          [&](const If& i) {
            if (pattern::truthy(eval(i.cond, env)))
              exec(*i.then, env);
            else if (i.otherwise)
              exec(**i.otherwise, env);
          },
          [&](const Try& t) {
            try {
              exec(*t.body, env);
            } catch (const RuleFailed& e) {
              if (options_.trace) *options_.trace << "try: absorbed failure: " << e.what() << '\n';
            }
          },
          [&](const Choose& c) { exec_choose(c, env); },
          [&](const Forall& f) { exec_forall(f, env); },
          [&](const Iterate& it) {
            const auto& choose = std::get<Choose>(it.body->node);
            std::uint64_t rounds = 0;
            while (true) {
              try {
                exec_choose(choose, env);
              } catch (const RuleFailed&) {
                break;
              }
              if (++rounds >= options_.iterate_budget)
                throw BudgetExceeded("iterate exceeded its budget of " + std::to_string(options_.iterate_budget) +
                                     " iterations");
            }
            if (options_.trace) *options_.trace << "iterate: " << rounds << " rounds\n";
          },
          [&](const Call& c) { call(c, env); },
          [&](const Println& p) { say(to_display(eval(p.text, env))); },
          [&](const Skip&) {},
          [&](const NewEntity& n) {
            ElementId parent = kRootId;
            if (n.container && !pattern::is_namespace_name(*n.container)) parent = element(*n.container, env, "new");
            env.set(n.var, space_.new_entity(type(n.type), parent));
          },
          [&](const NewRelation& n) {
            std::optional<TypeId> t;
            if (n.type) t = type(*n.type);
            ElementId src = element(n.src, env, "new");
            ElementId trg = element(n.trg, env, "new");
            env.set(n.rel, space_.new_relation(t, src, trg));
          },
          [&](const NewInstanceOf& n) { space_.add_type(element(n.var, env, "new(instanceOf)"), type(n.type)); },
          [&](const Delete& d) { space_.remove(element(d.var, env, "delete")); },
          [&](const DeleteInstanceOf& d) {
            space_.remove_type(element(d.var, env, "delete(instanceOf)"), type(d.type));
          },
          [&](const SetValue& sv) {
            Value v = eval(sv.value, env);
            if (is_element(v)) throw RuntimeError("setValue: a model element is not a value");
            space_.set_value(element(sv.var, env, "setValue"), std::move(v));
          },
          [&](const SetTo& st) { space_.set_target(element(st.rel, env, "setTo"), element(st.target, env, "setTo")); },
          [&](const Rename& r) {
            Value v = eval(r.name, env);
            space_.rename(element(r.var, env, "rename"), to_display(v));
          },
      },
      s.node);
}

void Engine::call(const Call& c, Env& env) {
  const AsmRule& rule = program_.rules.at(c.rule);
  if (options_.trace) *options_.trace << "call " << c.rule << '\n';
  Env callee;
  callee.push();
  for (std::size_t i = 0; i < rule.params.size(); ++i)
    callee.declare(rule.params[i].name, rule.params[i].mode == ParamMode::Out ? Value{} : eval(c.args[i], env));
  exec(rule.body, callee);
  for (std::size_t i = 0; i < rule.params.size(); ++i)
    if (rule.params[i].mode == ParamMode::Out) env.set(c.args[i].var, callee.get(rule.params[i].name));
}

Tuple Engine::match_args(const std::vector<std::string>& vars, const std::vector<std::string>& args, Env& env) const {
  Tuple binding;
  for (const auto& a : args) {
    if (std::find(vars.begin(), vars.end(), a) != vars.end()) {
      binding.emplace_back();
      continue;
    }
    const Value* v = env.find(a);
    binding.push_back(v ? *v : Value{});
  }
  return binding;
}

namespace {

// A variable passed at several positions must take one value.
bool consistent(const std::vector<std::string>& args, const Tuple& t) {
  for (std::size_t i = 0; i < args.size(); ++i)
    for (std::size_t j = i + 1; j < args.size(); ++j)
      if (args[i] == args[j] && t[i] != t[j]) return false;
  return true;
}

}  // namespace

std::vector<Tuple> Engine::gt_candidates(const CompiledGt& gt, const Tuple& args) {
  const auto& pre = program_.library.at(gt.pre);
  Tuple binding(pre.arity());
  for (std::size_t i = 0; i < gt.params.size(); ++i) {
    auto it = std::find(pre.params.begin(), pre.params.end(), gt.params[i].name);
    if (it != pre.params.end()) binding[it - pre.params.begin()] = args[i];
  }
  return matcher_->match_all(gt.pre, binding);
}

Tuple Engine::apply_match(const CompiledGt& gt, const Tuple& args, const Tuple& pre_match) {
  if (options_.trace) *options_.trace << "apply " << gt.name << '\n';
  const auto& pre = program_.library.at(gt.pre);
  Env env;
  env.push();
  for (const auto& v : gt.vars) env.declare(v, Value{});
  for (std::size_t i = 0; i < gt.params.size(); ++i) env.declare(gt.params[i].name, args[i]);
  for (std::size_t i = 0; i < pre.arity(); ++i) env.declare(pre.params[i], pre_match[i]);

  for (const auto& c : gt.creates) {
    if (c.relation) {
      ElementId src = element(c.src, env, "gtrule");
      ElementId trg = element(c.trg, env, "gtrule");
      env.set(c.var, space_.new_relation(c.type, src, trg));
    } else {
      ElementId parent = c.container ? element(*c.container, env, "gtrule") : kRootId;
      env.set(c.var, space_.new_entity(*c.type, parent));
    }
  }
  for (const auto& r : gt.retargets) {
    ElementId rel = element(r.rel, env, "gtrule");
    ElementId to = element(r.var, env, "gtrule");
    if (r.end == model::RelationEnd::Source)
      space_.set_source(rel, to);
    else
      space_.set_target(rel, to);
  }
  for (const auto& d : gt.deletes) {
    const auto* id = std::get_if<ElementId>(&env.get(d));
    if (id && space_.is_live(*id)) space_.remove(*id);
  }
  if (gt.action) exec(*gt.action, env);

  Tuple out;
  for (const auto& p : gt.params) out.push_back(env.get(p.name));
  return out;
}

std::optional<Tuple> Engine::apply(std::string_view gtrule, const Tuple& args) {
  auto it = program_.gtrules.find(std::string(gtrule));
  if (it == program_.gtrules.end()) throw LinkError("unknown gtrule '" + std::string(gtrule) + "'");
  if (args.size() != it->second.params.size()) throw RuntimeError("wrong number of arguments for '" + it->first + "'");
  auto candidates = gt_candidates(it->second, args);
  if (candidates.empty()) return std::nullopt;
  return apply_match(it->second, args, candidates.front());
}

void Engine::exec_choose(const Choose& c, Env& env) {
  const Tuple binding = match_args(c.vars, c.source.args, env);
  Tuple result;
  if (c.source.kind == MatchSource::Kind::Find) {
    const std::size_t p = program_.library.index(c.source.target);
    auto matches = matcher_->match_all(p, binding);
    auto it = std::find_if(matches.begin(), matches.end(), [&](const Tuple& t) { return consistent(c.source.args, t); });
    if (options_.trace) *options_.trace << "choose " << c.source.target << ": " << matches.size() << " matches\n";
    if (it == matches.end()) throw RuleFailed("choose: no match for '" + c.source.target + "'");
    result = *it;
  } else {
    const auto& gt = program_.gtrules.at(c.source.target);
    auto candidates = gt_candidates(gt, binding);
    if (candidates.empty()) throw RuleFailed("choose: gtrule '" + c.source.target + "' is not applicable");
    result = apply_match(gt, binding, candidates.front());
    // Out parameters flow back into variables of the enclosing scope.
    for (std::size_t i = 0; i < gt.params.size(); ++i) {
      const auto& a = c.source.args[i];
      if (gt.params[i].mode == ParamMode::Out &&
          std::find(c.vars.begin(), c.vars.end(), a) == c.vars.end() && env.find(a))
        env.set(a, result[i]);
    }
  }
  Env::Guard g(env);
  for (std::size_t i = 0; i < c.source.args.size(); ++i)
    if (std::find(c.vars.begin(), c.vars.end(), c.source.args[i]) != c.vars.end())
      env.declare(c.source.args[i], result[i]);
  exec(*c.body, env);
}

void Engine::exec_forall(const Forall& f, Env& env) {
  const Tuple binding = match_args(f.vars, f.source.args, env);
  auto alive = [&](const Tuple& t) {
    return std::all_of(t.begin(), t.end(), [&](const Value& v) {
      const auto* id = std::get_if<ElementId>(&v);
      return !id || space_.is_live(*id);
    });
  };
  auto run_body = [&](const Tuple& result) {
    Env::Guard g(env);
    for (std::size_t i = 0; i < f.source.args.size(); ++i)
      if (std::find(f.vars.begin(), f.vars.end(), f.source.args[i]) != f.vars.end())
        env.declare(f.source.args[i], result[i]);
    exec(*f.body, env);
  };

  if (f.source.kind == MatchSource::Kind::Find) {
    const std::size_t p = program_.library.index(f.source.target);
    const auto matches = matcher_->match_all(p, binding);
    if (options_.trace) *options_.trace << "forall " << f.source.target << ": " << matches.size() << " matches\n";
    for (const auto& m : matches) {
      if (!consistent(f.source.args, m) || !alive(m)) continue;
      run_body(m);
    }
    return;
  }
  const auto& gt = program_.gtrules.at(f.source.target);
  const auto candidates = gt_candidates(gt, binding);
  if (options_.trace) *options_.trace << "forall " << gt.name << ": " << candidates.size() << " matches\n";
  for (const auto& m : candidates) {
    if (!alive(m)) continue;
    // Earlier applications may have invalidated this match.
    if (matcher_->match_all(gt.pre, m).empty()) continue;
    Tuple result = apply_match(gt, binding, m);
    if (!consistent(f.source.args, result)) continue;
    run_body(result);
  }
}

}  // namespace gtvm::rules

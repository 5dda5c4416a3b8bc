#include <map>
#include <set>

#include "gtvm/overloaded.hpp"
#include "gtvm/rules/program.hpp"

namespace gtvm::rules {

namespace {

enum class VarKind { Param, Let, Bound };

class Checker {
 public:
  Checker(const Program& program, std::string where) : program_(program), where_(std::move(where)) {}

  void push(std::map<std::string, VarKind> scope) { scopes_.push_back(std::move(scope)); }
  void pop() { scopes_.pop_back(); }

  void stmt(const Stmt& s) {
    pos_ = s.pos;
    std::visit(Overloaded{
                   [&](const Seq& q) {
                     for (const auto& b : q.body) stmt(b);
                   },
                   [&](const Let& l) {
                     std::map<std::string, VarKind> scope;
                     for (const auto& v : l.vars) {
                       expr(v.init);
                       scope[v.name] = VarKind::Let;
                     }
                     push(std::move(scope));
                     stmt(*l.body);
                     pop();
                   },
                   [&](const Update& u) {
                     if (kind(u.var) != VarKind::Let) fail("update of '" + u.var + "', which is not a let variable");
                     expr(u.value);
                   },
                   [&](const If& i) {
                     expr(i.cond);
                     stmt(*i.then);
                     if (i.otherwise) stmt(**i.otherwise);
                   },
                   [&](const Try& t) { stmt(*t.body); },
                   [&](const Choose& c) { match(c.vars, c.source, *c.body); },
                   [&](const Forall& f) { match(f.vars, f.source, *f.body); },
                   [&](const Iterate& it) {
                     if (!std::holds_alternative<Choose>(it.body->node)) fail("iterate needs a choose statement");
                     stmt(*it.body);
                   },
                   [&](const Call& c) {
                     auto r = program_.rules.find(c.rule);
                     if (r == program_.rules.end()) fail("unknown rule '" + c.rule + "'");
                     const auto& params = r->second.params;
                     if (params.size() != c.args.size())
                       fail("rule '" + c.rule + "' expects " + std::to_string(params.size()) + " arguments");
                     for (std::size_t i = 0; i < params.size(); ++i) {
                       expr(c.args[i]);
                       if (params[i].mode != ParamMode::Out) continue;
                       if (c.args[i].kind != Expr::Kind::Var) fail("out argument of '" + c.rule + "' must be a variable");
                       assignable(c.args[i].var);
                     }
                   },
                   [&](const Println& p) { expr(p.text); },
                   [&](const Skip&) {},
                   [&](const NewEntity& n) {
                     assignable(n.var);
                     if (n.container && !pattern::is_namespace_name(*n.container)) kind(*n.container);
                   },
                   [&](const NewRelation& n) {
                     assignable(n.rel);
                     kind(n.src);
                     kind(n.trg);
                   },
                   [&](const NewInstanceOf& n) { kind(n.var); },
                   [&](const Delete& d) { kind(d.var); },
                   [&](const DeleteInstanceOf& d) { kind(d.var); },
                   [&](const SetValue& s) {
                     kind(s.var);
                     expr(s.value);
                   },
                   [&](const SetTo& s) {
                     kind(s.rel);
                     kind(s.target);
                   },
                   [&](const Rename& r) {
                     kind(r.var);
                     expr(r.name);
                   },
               },
               s.node);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::string at = pos_.line > 0 ? " (line " + std::to_string(pos_.line) + ")" : "";
    throw ValidationError(where_ + at + ": " + msg);
  }

  VarKind kind(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return f->second;
    fail("unknown variable '" + name + "'");
  }

  void assignable(const std::string& name) const {
    if (kind(name) == VarKind::Bound) fail("'" + name + "' is bound by a pattern and cannot be assigned");
  }

  void expr(const Expr& e) const {
    std::set<std::string> names;
    pattern::collect_vars(e, names);
    for (const auto& n : names) kind(n);
  }

  void match(const std::vector<std::string>& vars, const MatchSource& src, const Stmt& body) {
    std::size_t arity = 0;
    if (src.kind == MatchSource::Kind::Find) {
      auto idx = program_.library.find(src.target);
      if (!idx) fail("unknown pattern '" + src.target + "'");
      arity = program_.library.at(*idx).arity();
    } else {
      auto g = program_.gtrules.find(src.target);
      if (g == program_.gtrules.end()) fail("unknown gtrule '" + src.target + "'");
      arity = g->second.params.size();
    }
    if (arity != src.args.size())
      fail("'" + src.target + "' expects " + std::to_string(arity) + " arguments, got " +
           std::to_string(src.args.size()));
    std::map<std::string, VarKind> scope;
    for (const auto& v : vars) {
      if (std::find(src.args.begin(), src.args.end(), v) == src.args.end())
        fail("'" + v + "' does not occur among the arguments of '" + src.target + "'");
      scope[v] = VarKind::Bound;
    }
    for (const auto& a : src.args)
      if (!scope.contains(a)) kind(a);
    push(std::move(scope));
    stmt(body);
    pop();
  }

  const Program& program_;
  std::string where_;
  std::vector<std::map<std::string, VarKind>> scopes_;
  SourcePos pos_;
};

}  // namespace

void check_rule(const AsmRule& rule, const Program& program) {
  Checker c(program, "rule '" + rule.name + "'");
  std::map<std::string, VarKind> params;
  for (const auto& p : rule.params) {
    if (params.contains(p.name)) throw ValidationError("rule '" + rule.name + "': duplicate parameter '" + p.name + "'");
    params[p.name] = VarKind::Param;
  }
  c.push(std::move(params));
  c.stmt(rule.body);
}

void check_action(const CompiledGt& gt, const Program& program) {
  if (!gt.action) return;
  Checker c(program, "gtrule '" + gt.name + "'");
  std::map<std::string, VarKind> scope;
  for (const auto& v : gt.vars) scope[v] = VarKind::Bound;
  for (const auto& p : gt.params) scope[p.name] = VarKind::Param;
  c.push(std::move(scope));
  c.stmt(*gt.action);
}

}  // namespace gtvm::rules

#include <sstream>

#include "gtvm/overloaded.hpp"
#include "gtvm/vtcl/vtcl.hpp"

namespace gtvm::vtcl {

using namespace gtvm::rules;
using pattern::Pattern;

namespace {

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// Precedence: 0 equality, 1 addition, 2 primary. Both operators are
// left-associative, so a right operand of equal precedence needs parentheses.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Eq:
    case Expr::Kind::Ne: return 0;
    case Expr::Kind::Add: return 1;
    default: return 2;
  }
}

std::string expr_text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal: return to_literal(e.literal);
    case Expr::Kind::Var: return e.var;
    case Expr::Kind::ValueOf: return "value(" + e.var + ")";
    case Expr::Kind::NameOf: return "name(" + e.var + ")";
    default: break;
  }
  const int p = precedence(e);
  auto side = [&](const Expr& s, bool right) {
    std::string t = expr_text(s);
    const int q = precedence(s);
    return (q < p || (right && q == p)) ? "(" + t + ")" : t;
  };
  const char* op = e.kind == Expr::Kind::Add ? " + " : e.kind == Expr::Kind::Eq ? " == " : " != ";
  return side(e.args[0], false) + op + side(e.args[1], true);
}

class Printer {
 public:
  std::string machine(const Machine& m) {
    for (const auto& i : m.imports) line("import " + i + ";");
    if (!m.imports.empty()) out_ << '\n';
    for (const auto& a : m.annotations) line("@" + a);
    line("machine " + m.name + " {");
    ++depth_;
    bool first = true;
    auto gap = [&] {
      if (!first) out_ << '\n';
      first = false;
    };
    for (const auto& p : m.patterns) {
      gap();
      pattern_decl(p);
    }
    for (const auto& r : m.rules) {
      gap();
      indent();
      out_ << "rule " << r.name << "(" << params(r.params) << ") = ";
      stmt_inline(r.body);
    }
    for (const auto& g : m.gtrules) {
      gap();
      gtrule(g);
    }
    --depth_;
    line("}");
    return out_.str();
  }

 private:
  void indent() { out_ << std::string(2 * depth_, ' '); }
  void line(const std::string& s) {
    indent();
    out_ << s << '\n';
  }

  static std::string params(const std::vector<Param>& ps) {
    std::vector<std::string> v;
    for (const auto& p : ps) {
      const char* mode = p.mode == ParamMode::In ? "in " : p.mode == ParamMode::Out ? "out " : "";
      v.push_back(mode + p.name);
    }
    return join(v);
  }

  void pattern_decl(const Pattern& p) {
    if (p.localsearch) line("@localsearch");
    indent();
    out_ << (p.shareable ? "shareable " : "") << "pattern ";
    pattern_def(p);
    out_ << '\n';
  }

  // Writes `name(params) = {...} or {...}` starting at the current column.
  void pattern_def(const Pattern& p) {
    out_ << p.name << "(" << join(p.params) << ") = ";
    for (std::size_t b = 0; b < p.bodies.size(); ++b) {
      if (b) out_ << " or ";
      out_ << "{\n";
      ++depth_;
      for (const auto& c : p.bodies[b].constraints) constraint(c);
      --depth_;
      indent();
      out_ << "}";
    }
  }

  void constraint(const pattern::Constraint& c) {
    std::visit(Overloaded{
                   [&](const pattern::EntityType& e) {
                     line(e.type.name + "(" + e.var + ")" + (e.container ? " in " + *e.container : "") + ";");
                   },
                   [&](const pattern::RelationTyped& r) {
                     line(r.type.name + "(" + r.rel + ", " + r.src + ", " + r.trg + ");");
                   },
                   [&](const pattern::RelationAny& r) { line("relation(" + r.rel + ", " + r.src + ", " + r.trg + ");"); },
                   [&](const pattern::FindCall& f) { line("find " + f.pattern.name + "(" + join(f.args) + ");"); },
                   [&](const pattern::NegFind& n) {
                     if (n.inline_def) {
                       indent();
                       out_ << "neg pattern ";
                       pattern_def(**n.inline_def);
                       out_ << '\n';
                       return;
                     }
                     line("neg find " + n.pattern.name + "(" + join(n.args) + ");");
                   },
                   [&](const pattern::Check& ch) { line("check(" + expr_text(ch.expr) + ");"); },
                   [&](const pattern::CountFind& cf) {
                     line("find " + cf.pattern.name + "(" + join(cf.args) + ") # " + cf.count_var + ";");
                   },
               },
               c);
  }

  void condition(const char* kw, const Condition& c) {
    indent();
    out_ << kw << ' ';
    if (const auto* p = std::get_if<Pattern>(&c)) {
      out_ << "pattern ";
      pattern_def(*p);
      out_ << '\n';
    } else {
      const auto& f = std::get<pattern::FindCall>(c);
      out_ << "find " << f.pattern.name << "(" << join(f.args) << ")\n";
    }
  }

  void gtrule(const GtRule& g) {
    line("gtrule " + g.name + "(" + params(g.params) + ") = {");
    ++depth_;
    condition("precondition", g.precondition);
    if (g.postcondition) condition("postcondition", *g.postcondition);
    if (g.action) {
      line("action {");
      ++depth_;
      for (const auto& s : std::get<Seq>(g.action->node).body) {
        indent();
        stmt_inline(s);
      }
      --depth_;
      line("}");
    }
    --depth_;
    line("}");
  }

  static std::string source(const MatchSource& s) {
    return std::string(s.kind == MatchSource::Kind::Find ? "find " : "apply ") + s.target + "(" + join(s.args) + ")";
  }

  // Writes a statement starting at the current column and ends the line.
  void stmt_inline(const Stmt& s) {
    std::visit(Overloaded{
                   [&](const Seq& q) {
                     out_ << "seq {\n";
                     ++depth_;
                     for (const auto& b : q.body) {
                       indent();
                       stmt_inline(b);
                     }
                     --depth_;
                     indent();
                     out_ << "}\n";
                   },
                   [&](const Let& l) {
                     std::vector<std::string> v;
                     for (const auto& b : l.vars) v.push_back(b.name + " = " + expr_text(b.init));
                     out_ << "let " << join(v) << " in ";
                     stmt_inline(*l.body);
                   },
                   [&](const Update& u) { out_ << "update " << u.var << " = " << expr_text(u.value) << ";\n"; },
                   [&](const If& i) {
                     out_ << "if (" << expr_text(i.cond) << ") ";
                     stmt_inline(*i.then);
                     if (i.otherwise) {
                       indent();
                       out_ << "else ";
                       stmt_inline(**i.otherwise);
                     }
                   },
                   [&](const Try& t) {
                     out_ << "try ";
                     stmt_inline(*t.body);
                   },
                   [&](const Choose& c) {
                     out_ << "choose " << join(c.vars) << (c.vars.empty() ? "" : " ") << "with " << source(c.source)
                          << " do ";
                     stmt_inline(*c.body);
                   },
                   [&](const Forall& f) {
                     out_ << "forall " << join(f.vars) << (f.vars.empty() ? "" : " ") << "with " << source(f.source)
                          << " do ";
                     stmt_inline(*f.body);
                   },
                   [&](const Iterate& it) {
                     out_ << "iterate ";
                     stmt_inline(*it.body);
                   },
                   [&](const Call& c) {
                     std::vector<std::string> v;
                     for (const auto& a : c.args) v.push_back(expr_text(a));
                     out_ << "call " << c.rule << "(" << join(v) << ");\n";
                   },
                   [&](const Println& p) { out_ << "println(" << expr_text(p.text) << ");\n"; },
                   [&](const Skip&) { out_ << "skip;\n"; },
                   [&](const NewEntity& n) {
                     out_ << "new(" << n.type.name << "(" << n.var << ")" << (n.container ? " in " + *n.container : "")
                          << ");\n";
                   },
                   [&](const NewRelation& n) {
                     out_ << "new(" << (n.type ? n.type->name : "relation") << "(" << n.rel << ", " << n.src << ", "
                          << n.trg << "));\n";
                   },
                   [&](const NewInstanceOf& n) { out_ << "new(instanceOf(" << n.var << ", " << n.type.name << "));\n"; },
                   [&](const Delete& d) { out_ << "delete(" << d.var << ");\n"; },
                   [&](const DeleteInstanceOf& d) {
                     out_ << "delete(instanceOf(" << d.var << ", " << d.type.name << "));\n";
                   },
                   [&](const SetValue& v) { out_ << "setValue(" << v.var << ", " << expr_text(v.value) << ");\n"; },
                   [&](const SetTo& t) { out_ << "setTo(" << t.rel << ", " << t.target << ");\n"; },
                   [&](const Rename& r) { out_ << "rename(" << r.var << ", " << expr_text(r.name) << ");\n"; },
               },
               s.node);
  }

  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::string print(const Machine& machine) { return Printer().machine(machine); }

std::string print(const pattern::Expr& expr) { return expr_text(expr); }

}  // namespace gtvm::vtcl

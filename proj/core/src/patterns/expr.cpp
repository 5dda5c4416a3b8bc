#include "gtvm/patterns/expr.hpp"

namespace gtvm::pattern {

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::ValueOf || e.kind == Expr::Kind::NameOf) out.insert(e.var);
  for (const auto& a : e.args) collect_vars(a, out);
}

void rename_vars(Expr& e, const std::function<std::string(const std::string&)>& f) {
  if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::ValueOf || e.kind == Expr::Kind::NameOf) e.var = f(e.var);
  for (auto& a : e.args) rename_vars(a, f);
}

namespace {

ElementId element_arg(const Expr& e, const Lookup& lookup, const char* fn) {
  Value v = lookup(e.var);
  if (const auto* id = std::get_if<ElementId>(&v)) return *id;
  throw RuntimeError(std::string(fn) + "(" + e.var + ") needs a model element, got " + to_display(v));
}

}  // namespace

Value evaluate(const Expr& e, const Lookup& lookup, const model::ModelSpace& space) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return e.literal;
    case Expr::Kind::Var:
      return lookup(e.var);
    case Expr::Kind::ValueOf: {
      ElementId id = element_arg(e, lookup, "value");
      if (!space.is_live(id)) throw RuntimeError("value(" + e.var + ") of a deleted element");
      return space.value(id);
    }
    case Expr::Kind::NameOf: {
      ElementId id = element_arg(e, lookup, "name");
      if (!space.is_live(id)) throw RuntimeError("name(" + e.var + ") of a deleted element");
      return space.name(id);
    }
    case Expr::Kind::Add: {
      Value a = evaluate(e.args[0], lookup, space);
      Value b = evaluate(e.args[1], lookup, space);
      const auto* ia = std::get_if<std::int64_t>(&a);
      const auto* ib = std::get_if<std::int64_t>(&b);
      if (ia && ib) return *ia + *ib;
      const bool sa = std::holds_alternative<std::string>(a);
      const bool sb = std::holds_alternative<std::string>(b);
      if ((sa || sb) && !is_element(a) && !is_element(b)) return to_display(a) + to_display(b);
      throw RuntimeError("cannot add " + to_literal(a) + " and " + to_literal(b));
    }
    case Expr::Kind::Eq:
    case Expr::Kind::Ne: {
      bool eq = evaluate(e.args[0], lookup, space) == evaluate(e.args[1], lookup, space);
      return std::int64_t{(e.kind == Expr::Kind::Eq) == eq ? 1 : 0};
    }
  }
  return {};
}

bool truthy(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
  return !is_undef(v);
}

}  // namespace gtvm::pattern

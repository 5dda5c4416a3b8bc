#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gtvm/error.hpp"
#include "gtvm/modelspace/model_space.hpp"
#include "gtvm/value.hpp"

namespace gtvm::pattern {

/// Expressions shared by `check(...)` and the control language.
struct Expr {
  enum class Kind { Literal, Var, ValueOf, NameOf, Add, Eq, Ne };

  Kind kind = Kind::Literal;
  Value literal;            // Literal
  std::string var;          // Var, ValueOf, NameOf
  std::vector<Expr> args;   // Add, Eq, Ne: exactly two
  SourcePos pos;

  static Expr lit(Value v) { return Expr{Kind::Literal, std::move(v), {}, {}, {}}; }
  static Expr variable(std::string name) { return Expr{Kind::Var, {}, std::move(name), {}, {}}; }
  static Expr value_of(std::string name) { return Expr{Kind::ValueOf, {}, std::move(name), {}, {}}; }
  static Expr name_of(std::string name) { return Expr{Kind::NameOf, {}, std::move(name), {}, {}}; }
  static Expr binary(Kind k, Expr a, Expr b) {
    Expr e{k, {}, {}, {}, {}};
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  bool operator==(const Expr&) const = default;
};

/// Every variable name the expression reads.
void collect_vars(const Expr& e, std::set<std::string>& out);

/// Renames variables in place.
void rename_vars(Expr& e, const std::function<std::string(const std::string&)>& f);

using Lookup = std::function<Value(const std::string&)>;

/// Evaluates with the documented semantics: `+` adds integers or concatenates
/// when either side is a string (undef renders as "undef"); `==`/`!=` yield
/// 1 or 0. Throws RuntimeError on type errors.
Value evaluate(const Expr& e, const Lookup& lookup, const model::ModelSpace& space);

bool truthy(const Value& v);

}  // namespace gtvm::pattern

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gtvm/box.hpp"
#include "gtvm/error.hpp"
#include "gtvm/patterns/expr.hpp"

namespace gtvm::pattern {

/// A type reference as written in source; resolved against the registry
/// during validation.
struct TypeRef {
  std::string name;
  bool operator==(const TypeRef&) const = default;
};

/// A pattern reference. After linking, `name` is fully qualified.
struct PatternRef {
  std::string name;
  bool operator==(const PatternRef&) const = default;
};

/// `T(X)` or `T(X) in P`. A dotted container names a namespace (the model
/// root); a plain identifier is a variable and means transitive containment.
struct EntityType {
  TypeRef type;
  std::string var;
  std::optional<std::string> container;
  SourcePos pos;
  bool operator==(const EntityType&) const = default;
};

struct RelationTyped {
  TypeRef type;
  std::string rel, src, trg;
  SourcePos pos;
  bool operator==(const RelationTyped&) const = default;
};

struct RelationAny {
  std::string rel, src, trg;
  SourcePos pos;
  bool operator==(const RelationAny&) const = default;
};

struct FindCall {
  PatternRef pattern;
  std::vector<std::string> args;
  SourcePos pos;
  bool operator==(const FindCall&) const = default;
};

struct Pattern;

struct NegFind {
  PatternRef pattern;
  std::vector<std::string> args;
  /// Set for `neg pattern name(params) = {...}`; the arguments are then the
  /// inline pattern's parameters.
  std::optional<Box<Pattern>> inline_def;
  SourcePos pos;
  bool operator==(const NegFind&) const = default;
};

struct Check {
  Expr expr;
  SourcePos pos;
  bool operator==(const Check&) const = default;
};

struct CountFind {
  PatternRef pattern;
  std::vector<std::string> args;
  std::string count_var;
  SourcePos pos;
  bool operator==(const CountFind&) const = default;
};

using Constraint = std::variant<EntityType, RelationTyped, RelationAny, FindCall, NegFind, Check, CountFind>;

struct PatternBody {
  std::vector<Constraint> constraints;
  bool operator==(const PatternBody&) const = default;
};

struct Pattern {
  std::string name;
  std::vector<std::string> params;
  std::vector<PatternBody> bodies;
  bool shareable = false;
  bool localsearch = false;
  SourcePos pos;
  bool operator==(const Pattern&) const = default;
};

bool is_namespace_name(const std::string& container);

}  // namespace gtvm::pattern

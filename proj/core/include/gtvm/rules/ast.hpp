#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gtvm/box.hpp"
#include "gtvm/error.hpp"
#include "gtvm/patterns/expr.hpp"
#include "gtvm/patterns/pattern.hpp"

namespace gtvm::rules {

using pattern::Expr;
using pattern::TypeRef;

struct Stmt;

struct Seq {
  std::vector<Stmt> body;
  bool operator==(const Seq&) const = default;
};

struct LetBinding {
  std::string name;
  Expr init;
  bool operator==(const LetBinding&) const = default;
};

struct Let {
  std::vector<LetBinding> vars;
  Box<Stmt> body;
  bool operator==(const Let&) const = default;
};

struct Update {
  std::string var;
  Expr value;
  bool operator==(const Update&) const = default;
};

struct If {
  Expr cond;
  Box<Stmt> then;
  std::optional<Box<Stmt>> otherwise;
  bool operator==(const If&) const = default;
};

struct Try {
  Box<Stmt> body;
  bool operator==(const Try&) const = default;
};

/// `find P(args)` or `apply R(args)`; arguments are variable names.
struct MatchSource {
  enum class Kind { Find, Apply };
  Kind kind = Kind::Find;
  std::string target;
  std::vector<std::string> args;
  bool operator==(const MatchSource&) const = default;
};

struct Choose {
  std::vector<std::string> vars;
  MatchSource source;
  Box<Stmt> body;
  bool operator==(const Choose&) const = default;
};

struct Forall {
  std::vector<std::string> vars;
  MatchSource source;
  Box<Stmt> body;
  bool operator==(const Forall&) const = default;
};

/// Repeats its inner `choose` until it fails.
struct Iterate {
  Box<Stmt> body;
  bool operator==(const Iterate&) const = default;
};

struct Call {
  std::string rule;
  std::vector<Expr> args;
  bool operator==(const Call&) const = default;
};

struct Println {
  Expr text;
  bool operator==(const Println&) const = default;
};

struct Skip {
  bool operator==(const Skip&) const = default;
};

/// `new(T(X) [in P])`
struct NewEntity {
  TypeRef type;
  std::string var;
  std::optional<std::string> container;
  bool operator==(const NewEntity&) const = default;
};

/// `new(T.r(R,S,D))`, or `new(relation(R,S,D))` when untyped.
struct NewRelation {
  std::optional<TypeRef> type;
  std::string rel, src, trg;
  bool operator==(const NewRelation&) const = default;
};

struct NewInstanceOf {
  std::string var;
  TypeRef type;
  bool operator==(const NewInstanceOf&) const = default;
};

struct Delete {
  std::string var;
  bool operator==(const Delete&) const = default;
};

struct DeleteInstanceOf {
  std::string var;
  TypeRef type;
  bool operator==(const DeleteInstanceOf&) const = default;
};

struct SetValue {
  std::string var;
  Expr value;
  bool operator==(const SetValue&) const = default;
};

/// `setTo(R, X)`: retargets relation R to X.
struct SetTo {
  std::string rel;
  std::string target;
  bool operator==(const SetTo&) const = default;
};

struct Rename {
  std::string var;
  Expr name;
  bool operator==(const Rename&) const = default;
};

using StmtNode = std::variant<Seq, Let, Update, If, Try, Choose, Forall, Iterate, Call, Println, Skip, NewEntity,
                              NewRelation, NewInstanceOf, Delete, DeleteInstanceOf, SetValue, SetTo, Rename>;

struct Stmt {
  StmtNode node;
  SourcePos pos;
  bool operator==(const Stmt&) const = default;
};

enum class ParamMode { Unspecified, In, Out };

struct Param {
  std::string name;
  ParamMode mode = ParamMode::Unspecified;
  bool operator==(const Param&) const = default;
};

struct AsmRule {
  std::string name;
  std::vector<Param> params;
  Stmt body;
  SourcePos pos;
  bool operator==(const AsmRule&) const = default;
};

/// A GT rule condition: an inline pattern or a `find` reference.
using Condition = std::variant<pattern::Pattern, pattern::FindCall>;

struct GtRule {
  std::string name;
  std::vector<Param> params;
  Condition precondition;
  std::optional<Condition> postcondition;
  std::optional<Stmt> action;  // a Seq
  SourcePos pos;
  bool operator==(const GtRule&) const = default;
};

struct Machine {
  std::vector<std::string> imports;
  std::vector<std::string> annotations;  // without '@'
  std::string name;
  std::vector<pattern::Pattern> patterns;
  std::vector<GtRule> gtrules;
  std::vector<AsmRule> rules;
  SourcePos pos;
  bool operator==(const Machine&) const = default;

  const AsmRule* rule(std::string_view n) const;
  const GtRule* gtrule(std::string_view n) const;
};

}  // namespace gtvm::rules

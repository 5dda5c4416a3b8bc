#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtvm/matcher_inc/rete.hpp"
#include "gtvm/matcher_ls/local_search.hpp"
#include "gtvm/modelspace/model_space.hpp"
#include "gtvm/rules/program.hpp"

namespace gtvm::rules {

enum class MatcherKind { Incremental, LocalSearch };

struct EngineOptions {
  MatcherKind matcher = MatcherKind::Incremental;
  /// Upper bound on the iterations of one `iterate` loop.
  std::uint64_t iterate_budget = 1'000'000;
  ls::Options local_search;
  std::ostream* echo = nullptr;   // println mirror
  std::ostream* trace = nullptr;  // engine log

  /// Defaults, with the iterate budget taken from GTVM_STEP_BUDGET if set.
  static EngineOptions from_env();
};

/// Raised by a `choose` without matches; only `try` absorbs it.
class RuleFailed : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

struct ResultEntry {
  ElementId owner;     // the IntResult/StringResult entity
  ElementId element;   // the value element
  std::string name;
  Value value;
};

struct ExecutionReport {
  std::vector<std::string> log;
  std::vector<ResultEntry> results;  // result elements created by the run

  /// Log lines, then one `<name> = <value>` line per result.
  std::string render() const;
};

/// Chooses a backend per pattern: the Rete network unless the pattern (or a
/// callee) is recursive or marked @localsearch, or local search was asked for.
class Matcher {
 public:
  Matcher(const pattern::PatternLibrary& library, model::ModelSpace& space, MatcherKind kind,
          ls::Options options = {});
  ~Matcher();

  /// Matches extending `binding` (undef = unbound), sorted.
  std::vector<Tuple> match_all(std::size_t pattern, const Tuple& binding);
  bool incremental(std::size_t pattern) const;

 private:
  const pattern::PatternLibrary& lib_;
  model::ModelSpace& space_;
  MatcherKind kind_;
  ls::LocalSearchMatcher ls_;
  std::unique_ptr<rete::ReteNetwork> rete_;
  std::map<std::size_t, rete::PatternHandle> handles_;
};

class Engine {
 public:
  Engine(const Program& program, model::ModelSpace& space, EngineOptions options = {});
  ~Engine();

  /// Runs `<machine>.main`.
  ExecutionReport run(std::string_view machine);

  /// Applies a GT rule once. `args` holds one value per rule parameter
  /// (undef = unbound); returns the parameter values after application, or
  /// nothing if the precondition has no match.
  std::optional<Tuple> apply(std::string_view gtrule, const Tuple& args);

  Matcher& matcher() { return *matcher_; }

 private:
  class Env;

  void exec(const Stmt& s, Env& env);
  void exec_choose(const Choose& c, Env& env);
  void exec_forall(const Forall& f, Env& env);
  void call(const Call& c, Env& env);
  Tuple match_args(const std::vector<std::string>& vars, const std::vector<std::string>& args, Env& env) const;
  std::vector<Tuple> gt_candidates(const CompiledGt& gt, const Tuple& args);
  Tuple apply_match(const CompiledGt& gt, const Tuple& args, const Tuple& pre_match);
  Value eval(const Expr& e, Env& env) const;
  ElementId element(const std::string& var, Env& env, const char* what) const;
  TypeId type(const TypeRef& ref) const;
  void say(const std::string& line);

  const Program& program_;
  model::ModelSpace& space_;
  EngineOptions options_;
  std::unique_ptr<Matcher> matcher_;
  ExecutionReport* report_ = nullptr;
};

}  // namespace gtvm::rules

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gtvm/modelspace/type_registry.hpp"
#include "gtvm/patterns/pattern.hpp"

namespace gtvm::pattern {

/// Compiled constraint kinds. `In` is split off `T(X) in P` when P is a
/// variable; namespace containers compile to nothing.
enum class Op { Type, In, Rel, RelAny, Find, Neg, Check, Count };

struct CConstraint {
  Op op = Op::Type;
  TypeId type{};
  // Type: a = X.  In: a = child, b = container.  Rel/RelAny: a = rel, b = src, c = trg.
  int a = -1, b = -1, c = -1;
  std::size_t callee = 0;   // Find, Neg, Count
  std::vector<int> args;    // Find, Neg, Count
  int count_var = -1;       // Count
  Expr expr;                // Check
  std::vector<int> reads;   // Check: variables read

  /// Variables that must be bound before the constraint can be evaluated
  /// as a filter (Neg/Count locals excluded).
  std::vector<int> inputs(const std::vector<char>& local) const;
  /// Variables the constraint may bind.
  std::vector<int> outputs() const;
};

struct CBody {
  std::vector<std::string> vars;   // index -> name; parameters come first
  std::vector<char> local;         // existential variable of one Neg/Count
  std::vector<CConstraint> constraints;
  /// Sets of variables that must bind pairwise distinct elements.
  std::vector<std::vector<int>> distinct_groups;
  std::unordered_map<std::string, int> index;  // own (non-local) variables
};

struct CPattern {
  std::string name;
  std::vector<std::string> params;
  bool shareable = false;
  bool localsearch = false;
  bool recursive = false;     // member of a call cycle
  bool needs_ls = false;      // recursive or @localsearch anywhere in its call closure
  std::size_t scc = 0;
  std::vector<CBody> bodies;

  std::size_t arity() const { return params.size(); }
};

/// A set of named patterns, validated and compiled as a unit.
class PatternLibrary {
 public:
  /// `p.name` must be fully qualified; pattern references inside it too.
  void add(Pattern p, std::vector<std::string> imports = {});
  bool contains(std::string_view name) const { return by_name_.contains(std::string(name)); }

  /// Resolves types and callees, checks arities, variable binding, recursion
  /// rules, and builds the compiled form. Throws ValidationError.
  void validate(const model::TypeRegistry& types);
  bool validated() const { return validated_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index(std::string_view name) const;
  std::size_t size() const { return sources_.size(); }
  const CPattern& at(std::size_t i) const { return compiled_.at(i); }
  const CPattern& at(std::string_view name) const { return compiled_.at(index(name)); }
  const Pattern& source(std::size_t i) const { return sources_.at(i); }
  const Pattern& source(std::string_view name) const { return sources_.at(index(name)); }
  const std::vector<std::string>& imports(std::size_t i) const { return imports_.at(i); }
  std::vector<std::string> names() const;

  /// Patterns in the same strongly connected component of the call graph.
  const std::vector<std::size_t>& scc_members(std::size_t i) const { return sccs_.at(compiled_.at(i).scc); }

  /// Compiles a pattern that is not part of the library against it (used for
  /// GT postconditions). Parameters need not be bound positively when
  /// `require_bound_params` is false.
  CPattern compile_external(const Pattern& p, const std::vector<std::string>& imports,
                            const model::TypeRegistry& types, bool require_bound_params) const;

 private:
  CBody compile_body(const Pattern& p, const PatternBody& body, std::size_t body_no,
                     const std::vector<std::string>& imports, const model::TypeRegistry& types,
                     bool require_bound_params) const;

  std::vector<Pattern> sources_;
  std::vector<std::vector<std::string>> imports_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<CPattern> compiled_;
  std::vector<std::vector<std::size_t>> sccs_;
  bool validated_ = false;
};

/// Inlines single-body positive `find` calls (recursively) into `body`.
/// Callee-internal variables get fresh names `<prefix>#<n>#<name>`, which
/// cannot clash with source identifiers.
PatternBody flatten(const PatternBody& body, const PatternLibrary& library, const std::string& prefix);

/// Every variable name occurring in a constraint, in order.
std::vector<std::string> constraint_vars(const Constraint& c);

}  // namespace gtvm::pattern

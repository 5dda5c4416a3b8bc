#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gtvm/modelspace/model_space.hpp"
#include "gtvm/patterns/library.hpp"

namespace gtvm::ls {

struct Options {
  /// Upper bound on candidate extensions tried per top-level call.
  std::uint64_t step_budget = 50'000'000;
  /// When set, each body's search plan is drawn at random among legal plans.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Step of a search plan, for inspection and tests.
struct PlanStep {
  std::size_t constraint = 0;
  pattern::Op op = pattern::Op::Type;
  bool filter = false;  // every variable already bound
};

/// Backtracking matcher over a validated library. Recursive components are
/// evaluated to a fixpoint (semi-naive), so cyclic graphs terminate.
class LocalSearchMatcher {
 public:
  LocalSearchMatcher(const pattern::PatternLibrary& library, const model::ModelSpace& space, Options options = {});

  /// All matches extending `binding` (empty = nothing bound; otherwise one
  /// entry per parameter with undef meaning unbound), sorted.
  std::vector<Tuple> match_all(std::string_view pattern, const Tuple& binding = {});
  std::vector<Tuple> match_all(std::size_t pattern, const Tuple& binding = {});
  std::optional<Tuple> match_one(std::string_view pattern, const Tuple& binding = {});
  std::size_t count(std::string_view pattern, const Tuple& binding = {});

  /// The plan chosen for a body given which variables are bound on entry.
  std::vector<PlanStep> plan(std::size_t pattern, std::size_t body, const std::vector<char>& bound);

  std::uint64_t last_steps() const { return last_steps_; }

 private:
  struct Context;

  const pattern::PatternLibrary& lib_;
  const model::ModelSpace& space_;
  Options options_;
  std::mt19937_64 rng_;
  std::uint64_t last_steps_ = 0;

  friend struct Context;
};

}  // namespace gtvm::ls

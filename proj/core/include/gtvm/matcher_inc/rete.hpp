#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string_view>
#include <vector>

#include "gtvm/modelspace/model_space.hpp"
#include "gtvm/patterns/library.hpp"

namespace gtvm::rete {

class Node;
class Production;
class TypeAlpha;
class RelationAlpha;
class ContainmentAlpha;
class CheckFilter;

struct PatternHandle {
  std::size_t slot = 0;
  std::uint64_t generation = 0;
};

struct Delta {
  std::vector<Tuple> appeared;
  std::vector<Tuple> disappeared;
};

/// Incremental matcher. Subscribes to the space on construction and keeps
/// every registered pattern's match set current after each change event.
/// Recursive and @localsearch patterns (or anything calling them) are refused.
class ReteNetwork {
 public:
  ReteNetwork(const pattern::PatternLibrary& library, model::ModelSpace& space);
  ~ReteNetwork();
  ReteNetwork(const ReteNetwork&) = delete;
  ReteNetwork& operator=(const ReteNetwork&) = delete;

  static bool supports(const pattern::PatternLibrary& library, std::size_t pattern);

  PatternHandle register_pattern(std::string_view name);
  PatternHandle register_pattern(std::size_t pattern);

  std::vector<Tuple> matches(PatternHandle h) const;
  std::size_t count(PatternHandle h) const;
  /// Position in the handle's change log; pass to delta_since later.
  std::size_t cursor(PatternHandle h) const;
  /// Net change since `cursor`: tuples that are now present but were not,
  /// and the reverse. A tuple that appeared and disappeared again is absent.
  Delta delta_since(PatternHandle h, std::size_t cursor) const;

  void on_change(const model::ChangeEvent& event);

  std::size_t node_count() const { return nodes_.size(); }

  /// Drops the whole network; outstanding handles become stale.
  void reset();

 private:
  struct BodySchema;

  Production& production_of(PatternHandle h) const;
  Production* build_production(std::size_t pattern);
  Node* build_body(std::size_t pattern, std::size_t body);
  Node* adapter(Node* source, const std::vector<int>& columns, std::vector<int>& schema);
  TypeAlpha* type_alpha(TypeId t);
  RelationAlpha* relation_alpha(std::optional<TypeId> t);
  ContainmentAlpha* containment_alpha();
  Node* unit();

  template <class T, class... Args>
  T* make(Args&&... args);

  void entity_types_changed(ElementId id, const std::set<TypeId>& before, const std::set<TypeId>& after);
  void relation_types_changed(const model::ModelElement& r, const std::set<TypeId>& before,
                              const std::set<TypeId>& after);

  const pattern::PatternLibrary& lib_;
  model::ModelSpace& space_;
  model::Subscription subscription_;
  std::uint64_t generation_ = 1;

  std::vector<std::unique_ptr<Node>> nodes_;
  std::map<std::size_t, Production*> productions_;
  std::vector<Production*> slots_;
  std::map<TypeId, TypeAlpha*> type_alphas_;
  std::map<std::optional<TypeId>, RelationAlpha*> relation_alphas_;
  ContainmentAlpha* containment_ = nullptr;
  Node* unit_ = nullptr;
  std::map<std::pair<Node*, std::vector<int>>, Node*> adapters_;
  std::vector<CheckFilter*> checks_;
};

}  // namespace gtvm::rete

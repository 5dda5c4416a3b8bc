#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtvm/modelspace/change_event.hpp"
#include "gtvm/modelspace/type_registry.hpp"
#include "gtvm/value.hpp"

namespace gtvm::model {

class ModelSpace;

/// RAII handle for a change listener. Unsubscribes on destruction; must not
/// outlive the space it was obtained from.
class Subscription {
 public:
  Subscription() = default;
  Subscription(ModelSpace* space, std::uint64_t id) : space_(space), id_(id) {}
  Subscription(Subscription&& other) noexcept;
  Subscription& operator=(Subscription&& other) noexcept;
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;
  ~Subscription();

  void reset();

 private:
  ModelSpace* space_ = nullptr;
  std::uint64_t id_ = 0;
};

/// The typed graph store.
///
/// Elements live in a containment tree under a distinguished root entity
/// (`kRootId`). Every mutation notifies all subscribers synchronously, in
/// mutation order, before returning. Single writer; readers must not run
/// concurrently with a mutation.
class ModelSpace {
 public:
  using Listener = std::function<void(const ChangeEvent&)>;

  explicit ModelSpace(TypeRegistry types = {});

  // Moving is only allowed while nobody is subscribed.
  ModelSpace(ModelSpace&& other) noexcept;
  ModelSpace& operator=(ModelSpace&& other) noexcept;
  ModelSpace(const ModelSpace&) = delete;
  ModelSpace& operator=(const ModelSpace&) = delete;

  TypeRegistry& types() { return types_; }
  const TypeRegistry& types() const { return types_; }

  // Mutations -------------------------------------------------------------

  ElementId new_entity(TypeId type, std::optional<ElementId> parent = std::nullopt);
  /// An absent type creates an untyped relation (as used for traceability links).
  ElementId new_relation(std::optional<TypeId> type, ElementId source, ElementId target);

  /// Removes `id`, everything it transitively contains and every relation
  /// incident to any removed element. Incident relations and children are
  /// removed (and reported) before the element itself.
  void remove(ElementId id);

  void add_type(ElementId id, TypeId type);
  void remove_type(ElementId id, TypeId type);
  void set_value(ElementId id, Value value);
  void rename(ElementId id, std::string name);
  void set_source(ElementId relation, ElementId source);
  void set_target(ElementId relation, ElementId target);

  /// Re-creates an element with a given id (snapshot loading, replay).
  void restore(const ModelElement& element);

  /// Applies a recorded change event; replaying a full event stream onto an
  /// empty space reproduces the original space.
  void apply(const ChangeEvent& event);

  // Queries ---------------------------------------------------------------

  bool is_live(ElementId id) const { return elements_.contains(id); }
  const ModelElement& get(ElementId id) const;

  std::vector<ElementId> elements_of_type(TypeId type, bool include_subtypes = true) const;
  std::size_t count_of_type(TypeId type, bool include_subtypes = true) const;
  std::vector<ElementId> relations_with_endpoint(ElementId id) const;
  const std::set<ElementId>& outgoing(ElementId id) const;
  const std::set<ElementId>& incoming(ElementId id) const;
  const std::set<ElementId>& children(ElementId id) const;
  std::optional<ElementId> parent(ElementId id) const;
  const Value& value(ElementId id) const;
  const std::string& name(ElementId id) const;
  bool conforms(ElementId id, TypeId type) const;
  /// True if `ancestor` is a proper containment ancestor of `id`.
  bool contained_in(ElementId id, ElementId ancestor) const;

  const std::set<ElementId>& relations() const { return relations_; }
  std::vector<ElementId> all_elements(bool include_root = false) const;
  std::size_t size() const { return elements_.size() - 1; }
  ElementId next_id() const { return ElementId{next_id_}; }

  /// Full referential-integrity check; returns human-readable violations.
  std::vector<std::string> audit() const;

  Subscription subscribe(Listener listener);

 private:
  friend class Subscription;

  ModelElement& live(ElementId id);
  const ModelElement& live(ElementId id) const;
  void insert(ModelElement element);
  void erase_one(ElementId id);
  void collect_removal(ElementId id, std::set<ElementId>& seen, std::vector<ElementId>& order) const;
  void emit(const ChangeEvent& event);
  void unsubscribe(std::uint64_t id);

  TypeRegistry types_;
  std::map<ElementId, ModelElement> elements_;
  std::unordered_map<TypeId, std::set<ElementId>> by_type_;
  std::unordered_map<ElementId, std::set<ElementId>> outgoing_;
  std::unordered_map<ElementId, std::set<ElementId>> incoming_;
  std::unordered_map<ElementId, std::set<ElementId>> children_;
  std::set<ElementId> relations_;
  std::uint64_t next_id_ = 1;

  std::map<std::uint64_t, Listener> listeners_;
  std::uint64_t next_listener_ = 1;
};

}  // namespace gtvm::model

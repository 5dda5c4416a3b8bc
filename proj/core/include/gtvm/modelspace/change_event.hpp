#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>

#include "gtvm/value.hpp"

namespace gtvm::model {

enum class ElementKind { Entity, Relation };

/// An entity or a first-class relation. `source`/`target` are meaningful
/// only for relations; `parent` only ever refers to an entity.
struct ModelElement {
  ElementId id;
  ElementKind kind = ElementKind::Entity;
  std::string name;
  Value value;  // undef, integer or string; never an element
  std::optional<ElementId> parent;
  ElementId source;
  ElementId target;
  std::set<TypeId> types;

  bool is_relation() const { return kind == ElementKind::Relation; }
  bool operator==(const ModelElement&) const = default;
};

std::string auto_name(ElementKind kind, ElementId id);

enum class RelationEnd { Source, Target };

struct ElementCreated {
  ModelElement element;  // state right after creation
};
struct ElementDeleted {
  ModelElement element;  // last state before removal
};
struct TypeAdded {
  ElementId subject;
  TypeId type;
};
struct TypeRemoved {
  ElementId subject;
  TypeId type;
};
struct ValueSet {
  ElementId subject;
  Value old_value;
  Value new_value;
};
struct Renamed {
  ElementId subject;
  std::string old_name;
  std::string new_name;
};
struct EndpointRetargeted {
  ElementId subject;
  RelationEnd end = RelationEnd::Target;
  ElementId old_endpoint;
  ElementId new_endpoint;
};

using ChangeEvent =
    std::variant<ElementCreated, ElementDeleted, TypeAdded, TypeRemoved, ValueSet, Renamed, EndpointRetargeted>;

enum class ChangeKind { ElementCreated, ElementDeleted, TypeAdded, TypeRemoved, ValueSet, Renamed, EndpointRetargeted };

ChangeKind kind_of(const ChangeEvent& ev);
ElementId subject_of(const ChangeEvent& ev);

}  // namespace gtvm::model

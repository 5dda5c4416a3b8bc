#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gtvm/value.hpp"

namespace gtvm::model {

enum class TypeKind { Entity, Relation };

struct TypeInfo {
  std::string name;       // canonical dotted name, e.g. "graph1.Edge.src"
  std::string name_space; // enclosing namespace, e.g. "nemf.packages"; may be empty
  TypeKind kind = TypeKind::Entity;
  std::optional<TypeId> supertype;
  bool builtin = false;   // shipped metamodel type, omitted from snapshots
};

/// Metamodel registry. Single inheritance; supertypes must be registered
/// before their subtypes, so the subtype graph is always a forest.
class TypeRegistry {
 public:
  TypeId add(std::string name, TypeKind kind, std::optional<TypeId> supertype = std::nullopt,
             std::string name_space = {}, bool builtin = false);

  const TypeInfo& info(TypeId id) const;
  std::size_t size() const { return types_.size(); }
  bool contains(TypeId id) const { return id.value < types_.size(); }

  std::optional<TypeId> find(std::string_view canonical_name) const;
  TypeId get(std::string_view canonical_name) const;

  /// Resolves a type reference as written in a program. A reference matches
  /// a type either by its fully qualified name (namespace + canonical name)
  /// or by its canonical name when the type's namespace is imported.
  std::optional<TypeId> resolve(std::string_view reference, std::span<const std::string> imports) const;

  std::string qualified_name(TypeId id) const;

  /// Reflexive: every type is a subtype of itself.
  bool is_subtype(TypeId sub, TypeId super) const;

  /// `id` followed by all of its transitive subtypes.
  const std::vector<TypeId>& subtype_closure(TypeId id) const;

  std::vector<TypeId> all() const;

 private:
  std::vector<TypeInfo> types_;
  std::unordered_map<std::string, TypeId> by_name_;
  std::vector<std::vector<TypeId>> closure_;
};

}  // namespace gtvm::model

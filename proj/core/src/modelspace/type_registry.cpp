#include "gtvm/modelspace/type_registry.hpp"

#include <algorithm>

#include "gtvm/error.hpp"

namespace gtvm::model {

TypeId TypeRegistry::add(std::string name, TypeKind kind, std::optional<TypeId> supertype, std::string name_space,
                         bool builtin) {
  if (name.empty()) throw ModelError("type name must not be empty");
  if (by_name_.contains(name)) throw ModelError("type '" + name + "' already registered");
  if (supertype) {
    if (!contains(*supertype)) throw ModelError("unknown supertype for '" + name + "'");
    if (info(*supertype).kind != kind) throw ModelError("supertype of '" + name + "' has a different kind");
  }
  TypeId id{static_cast<std::uint32_t>(types_.size())};
  types_.push_back(TypeInfo{name, std::move(name_space), kind, supertype, builtin});
  by_name_.emplace(std::move(name), id);
  closure_.push_back({id});
  for (auto s = supertype; s; s = types_[s->value].supertype) closure_[s->value].push_back(id);
  return id;
}

const TypeInfo& TypeRegistry::info(TypeId id) const {
  if (!contains(id)) throw ModelError("unknown type id " + std::to_string(id.value));
  return types_[id.value];
}

std::optional<TypeId> TypeRegistry::find(std::string_view canonical_name) const {
  auto it = by_name_.find(std::string(canonical_name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeRegistry::get(std::string_view canonical_name) const {
  if (auto id = find(canonical_name)) return *id;
  throw ModelError("unknown type '" + std::string(canonical_name) + "'");
}

std::optional<TypeId> TypeRegistry::resolve(std::string_view reference, std::span<const std::string> imports) const {
  if (auto id = find(reference)) {
    const auto& ns = types_[id->value].name_space;
    if (ns.empty() || std::find(imports.begin(), imports.end(), ns) != imports.end()) return id;
  }
  // Fully qualified form: strip the longest namespace prefix that yields a match.
  for (std::size_t dot = reference.find('.'); dot != std::string_view::npos; dot = reference.find('.', dot + 1)) {
    auto ns = reference.substr(0, dot);
    auto rest = reference.substr(dot + 1);
    if (auto id = find(rest); id && types_[id->value].name_space == ns) return id;
  }
  return std::nullopt;
}

std::string TypeRegistry::qualified_name(TypeId id) const {
  const auto& t = info(id);
  return t.name_space.empty() ? t.name : t.name_space + "." + t.name;
}

bool TypeRegistry::is_subtype(TypeId sub, TypeId super) const {
  for (std::optional<TypeId> t = sub; t; t = info(*t).supertype)
    if (*t == super) return true;
  return false;
}

const std::vector<TypeId>& TypeRegistry::subtype_closure(TypeId id) const {
  info(id);
  return closure_[id.value];
}

std::vector<TypeId> TypeRegistry::all() const {
  std::vector<TypeId> out;
  out.reserve(types_.size());
  for (std::uint32_t i = 0; i < types_.size(); ++i) out.push_back(TypeId{i});
  return out;
}

}  // namespace gtvm::model

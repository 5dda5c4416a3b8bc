#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gtvm {

/// Identity of a model element. Assigned monotonically, never reused.
struct ElementId {
  std::uint64_t value = 0;

  constexpr auto operator<=>(const ElementId&) const = default;
};

inline constexpr ElementId kRootId{0};

/// Identity of a registered metamodel type.
struct TypeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const TypeId&) const = default;
};

/// A runtime value: undef, a model element, an integer or a string.
/// Variant order gives the deterministic total order used for match sorting.
using Value = std::variant<std::monostate, ElementId, std::int64_t, std::string>;

using Tuple = std::vector<Value>;

inline bool is_undef(const Value& v) { return std::holds_alternative<std::monostate>(v); }
inline bool is_element(const Value& v) { return std::holds_alternative<ElementId>(v); }

/// Renders a value the way string concatenation does: ints in decimal,
/// undef as "undef", elements as "#<id>".
std::string to_display(const Value& v);

/// Literal-style rendering used by printers and match listings.
std::string to_literal(const Value& v);

std::string quote_string(const std::string& s);

std::ostream& operator<<(std::ostream& os, ElementId id);

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept;
};

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept;
};

}  // namespace gtvm

template <>
struct std::hash<gtvm::ElementId> {
  std::size_t operator()(gtvm::ElementId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

template <>
struct std::hash<gtvm::TypeId> {
  std::size_t operator()(gtvm::TypeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

#include "gtvm/value.hpp"

namespace gtvm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string to_display(const Value& v) {
  return std::visit(Overloaded{
                        [](std::monostate) { return std::string("undef"); },
                        [](ElementId id) { return "#" + std::to_string(id.value); },
                        [](std::int64_t i) { return std::to_string(i); },
                        [](const std::string& s) { return s; },
                    },
                    v);
}

std::string quote_string(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string to_literal(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
  if (const auto* id = std::get_if<ElementId>(&v)) return std::to_string(id->value);
  return to_display(v);
}

std::ostream& operator<<(std::ostream& os, ElementId id) { return os << '#' << id.value; }

std::size_t ValueHash::operator()(const Value& v) const noexcept {
  std::size_t seed = v.index() * 0x9e3779b97f4a7c15ULL;
  std::size_t h = std::visit(Overloaded{
                                 [](std::monostate) -> std::size_t { return 0; },
                                 [](ElementId id) { return std::hash<std::uint64_t>{}(id.value); },
                                 [](std::int64_t i) { return std::hash<std::int64_t>{}(i); },
                                 [](const std::string& s) { return std::hash<std::string>{}(s); },
                             },
                             v);
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
  std::size_t seed = t.size();
  ValueHash vh;
  for (const auto& v : t) seed ^= vh(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

}  // namespace gtvm

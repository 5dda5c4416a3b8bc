#include "gtvm/modelspace/model_space.hpp"

#include <algorithm>
#include <cassert>

#include "gtvm/error.hpp"

namespace gtvm::model {

namespace {

const std::set<ElementId> kEmpty;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string describe(ElementId id) { return "element " + std::to_string(id.value); }

}  // namespace

std::string auto_name(ElementKind kind, ElementId id) {
  return (kind == ElementKind::Relation ? "r" : "e") + std::to_string(id.value);
}

ChangeKind kind_of(const ChangeEvent& ev) { return static_cast<ChangeKind>(ev.index()); }

ElementId subject_of(const ChangeEvent& ev) {
  return std::visit(Overloaded{
                        [](const ElementCreated& e) { return e.element.id; },
                        [](const ElementDeleted& e) { return e.element.id; },
                        [](const auto& e) { return e.subject; },
                    },
                    ev);
}

// Subscription ---------------------------------------------------------------

Subscription::Subscription(Subscription&& other) noexcept : space_(other.space_), id_(other.id_) {
  other.space_ = nullptr;
}

Subscription& Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    reset();
    space_ = other.space_;
    id_ = other.id_;
    other.space_ = nullptr;
  }
  return *this;
}

Subscription::~Subscription() { reset(); }

void Subscription::reset() {
  if (space_) space_->unsubscribe(id_);
  space_ = nullptr;
}

// ModelSpace -----------------------------------------------------------------

ModelSpace::ModelSpace(TypeRegistry types) : types_(std::move(types)) {
  ModelElement root;
  root.id = kRootId;
  root.kind = ElementKind::Entity;
  root.name = "root";
  elements_.emplace(kRootId, std::move(root));
}

ModelSpace::ModelSpace(ModelSpace&& other) noexcept
    : types_(std::move(other.types_)),
      elements_(std::move(other.elements_)),
      by_type_(std::move(other.by_type_)),
      outgoing_(std::move(other.outgoing_)),
      incoming_(std::move(other.incoming_)),
      children_(std::move(other.children_)),
      relations_(std::move(other.relations_)),
      next_id_(other.next_id_) {
  assert(other.listeners_.empty());
}

ModelSpace& ModelSpace::operator=(ModelSpace&& other) noexcept {
  assert(listeners_.empty() && other.listeners_.empty());
  types_ = std::move(other.types_);
  elements_ = std::move(other.elements_);
  by_type_ = std::move(other.by_type_);
  outgoing_ = std::move(other.outgoing_);
  incoming_ = std::move(other.incoming_);
  children_ = std::move(other.children_);
  relations_ = std::move(other.relations_);
  next_id_ = other.next_id_;
  return *this;
}

ModelElement& ModelSpace::live(ElementId id) {
  auto it = elements_.find(id);
  if (it == elements_.end()) throw ModelError(describe(id) + " is not live");
  return it->second;
}

const ModelElement& ModelSpace::live(ElementId id) const {
  auto it = elements_.find(id);
  if (it == elements_.end()) throw ModelError(describe(id) + " is not live");
  return it->second;
}

const ModelElement& ModelSpace::get(ElementId id) const { return live(id); }

void ModelSpace::insert(ModelElement element) {
  const ElementId id = element.id;
  for (TypeId t : element.types) by_type_[t].insert(id);
  if (element.parent) children_[*element.parent].insert(id);
  if (element.is_relation()) {
    outgoing_[element.source].insert(id);
    incoming_[element.target].insert(id);
    relations_.insert(id);
  }
  next_id_ = std::max(next_id_, id.value + 1);
  elements_.emplace(id, std::move(element));
}

void ModelSpace::erase_one(ElementId id) {
  auto node = elements_.extract(id);
  ModelElement& e = node.mapped();
  for (TypeId t : e.types) by_type_[t].erase(id);
  if (e.parent) children_[*e.parent].erase(id);
  if (e.is_relation()) {
    outgoing_[e.source].erase(id);
    incoming_[e.target].erase(id);
    relations_.erase(id);
  }
  outgoing_.erase(id);
  incoming_.erase(id);
  children_.erase(id);
  emit(ElementDeleted{std::move(e)});
}

ElementId ModelSpace::new_entity(TypeId type, std::optional<ElementId> parent) {
  if (!types_.contains(type) || types_.info(type).kind != TypeKind::Entity)
    throw ModelError("new_entity requires a registered entity type");
  const ElementId container = parent.value_or(kRootId);
  if (live(container).is_relation()) throw ModelError("parent " + describe(container) + " is a relation");

  ModelElement e;
  e.id = ElementId{next_id_};
  e.kind = ElementKind::Entity;
  e.name = auto_name(e.kind, e.id);
  e.parent = container;
  e.types.insert(type);
  const ElementId id = e.id;
  insert(e);
  emit(ElementCreated{std::move(e)});
  return id;
}

ElementId ModelSpace::new_relation(std::optional<TypeId> type, ElementId source, ElementId target) {
  if (type && (!types_.contains(*type) || types_.info(*type).kind != TypeKind::Relation))
    throw ModelError("new_relation requires a registered relation type");
  live(source);
  live(target);

  ModelElement e;
  e.id = ElementId{next_id_};
  e.kind = ElementKind::Relation;
  e.name = auto_name(e.kind, e.id);
  e.source = source;
  e.target = target;
  if (type) e.types.insert(*type);
  const ElementId id = e.id;
  insert(e);
  emit(ElementCreated{std::move(e)});
  return id;
}

void ModelSpace::collect_removal(ElementId id, std::set<ElementId>& seen, std::vector<ElementId>& order) const {
  if (!seen.insert(id).second) return;
  std::vector<ElementId> incident;
  if (auto it = outgoing_.find(id); it != outgoing_.end()) incident.insert(incident.end(), it->second.begin(), it->second.end());
  if (auto it = incoming_.find(id); it != incoming_.end()) incident.insert(incident.end(), it->second.begin(), it->second.end());
  std::sort(incident.begin(), incident.end());
  for (ElementId r : incident) collect_removal(r, seen, order);
  if (auto it = children_.find(id); it != children_.end())
    for (ElementId c : it->second) collect_removal(c, seen, order);
  order.push_back(id);
}

void ModelSpace::remove(ElementId id) {
  if (id == kRootId) throw ModelError("the model root cannot be deleted");
  live(id);
  std::set<ElementId> seen;
  std::vector<ElementId> order;
  collect_removal(id, seen, order);
  for (ElementId victim : order)
    if (is_live(victim)) erase_one(victim);
}

void ModelSpace::add_type(ElementId id, TypeId type) {
  auto& e = live(id);
  if (id == kRootId) throw ModelError("the model root cannot be typed");
  const auto& info = types_.info(type);
  const bool relation_type = info.kind == TypeKind::Relation;
  if (relation_type != e.is_relation())
    throw ModelError("type '" + info.name + "' does not fit the kind of " + describe(id));
  if (!e.types.insert(type).second) return;
  by_type_[type].insert(id);
  emit(TypeAdded{id, type});
}

void ModelSpace::remove_type(ElementId id, TypeId type) {
  auto& e = live(id);
  if (!e.types.erase(type))
    throw ModelError(describe(id) + " is not an instance of '" + types_.info(type).name + "'");
  by_type_[type].erase(id);
  emit(TypeRemoved{id, type});
}

void ModelSpace::set_value(ElementId id, Value value) {
  if (is_element(value)) throw ModelError("element values must be primitive");
  auto& e = live(id);
  Value old = std::exchange(e.value, value);
  emit(ValueSet{id, std::move(old), std::move(value)});
}

void ModelSpace::rename(ElementId id, std::string name) {
  auto& e = live(id);
  std::string old = std::exchange(e.name, name);
  emit(Renamed{id, std::move(old), std::move(name)});
}

void ModelSpace::set_source(ElementId relation, ElementId source) {
  auto& r = live(relation);
  if (!r.is_relation()) throw ModelError(describe(relation) + " is not a relation");
  live(source);
  const ElementId old = r.source;
  outgoing_[old].erase(relation);
  r.source = source;
  outgoing_[source].insert(relation);
  emit(EndpointRetargeted{relation, RelationEnd::Source, old, source});
}

void ModelSpace::set_target(ElementId relation, ElementId target) {
  auto& r = live(relation);
  if (!r.is_relation()) throw ModelError(describe(relation) + " is not a relation");
  live(target);
  const ElementId old = r.target;
  incoming_[old].erase(relation);
  r.target = target;
  incoming_[target].insert(relation);
  emit(EndpointRetargeted{relation, RelationEnd::Target, old, target});
}

void ModelSpace::restore(const ModelElement& element) {
  if (element.id == kRootId || is_live(element.id))
    throw ModelError("cannot restore " + describe(element.id) + ": id in use");
  for (TypeId t : element.types) {
    const bool relation_type = types_.info(t).kind == TypeKind::Relation;
    if (relation_type != element.is_relation()) throw ModelError("type kind mismatch restoring " + describe(element.id));
  }
  if (element.is_relation()) {
    live(element.source);
    live(element.target);
    if (element.parent) throw ModelError("relations cannot be contained");
  } else {
    const ElementId container = element.parent.value_or(kRootId);
    if (live(container).is_relation()) throw ModelError("parent of " + describe(element.id) + " is a relation");
  }
  ModelElement copy = element;
  if (!copy.is_relation() && !copy.parent) copy.parent = kRootId;
  insert(copy);
  emit(ElementCreated{std::move(copy)});
}

void ModelSpace::apply(const ChangeEvent& event) {
  std::visit(Overloaded{
                 [&](const ElementCreated& e) { restore(e.element); },
                 [&](const ElementDeleted& e) {
                   // Cascades are recorded element by element, so remove exactly one.
                   if (!outgoing(e.element.id).empty() || !incoming(e.element.id).empty() ||
                       !children(e.element.id).empty())
                     throw ModelError("replayed deletion of " + describe(e.element.id) + " is not a leaf");
                   live(e.element.id);
                   erase_one(e.element.id);
                 },
                 [&](const TypeAdded& e) { add_type(e.subject, e.type); },
                 [&](const TypeRemoved& e) { remove_type(e.subject, e.type); },
                 [&](const ValueSet& e) { set_value(e.subject, e.new_value); },
                 [&](const Renamed& e) { rename(e.subject, e.new_name); },
                 [&](const EndpointRetargeted& e) {
                   if (e.end == RelationEnd::Source)
                     set_source(e.subject, e.new_endpoint);
                   else
                     set_target(e.subject, e.new_endpoint);
                 },
             },
             event);
}

std::vector<ElementId> ModelSpace::elements_of_type(TypeId type, bool include_subtypes) const {
  if (!include_subtypes) {
    auto it = by_type_.find(type);
    if (it == by_type_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }
  std::vector<ElementId> out;
  for (TypeId t : types_.subtype_closure(type))
    if (auto it = by_type_.find(t); it != by_type_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t ModelSpace::count_of_type(TypeId type, bool include_subtypes) const {
  if (!include_subtypes) {
    auto it = by_type_.find(type);
    return it == by_type_.end() ? 0 : it->second.size();
  }
  const auto& closure = types_.subtype_closure(type);
  if (closure.size() == 1) return count_of_type(type, false);
  return elements_of_type(type, true).size();
}

std::vector<ElementId> ModelSpace::relations_with_endpoint(ElementId id) const {
  live(id);
  std::vector<ElementId> out(outgoing(id).begin(), outgoing(id).end());
  out.insert(out.end(), incoming(id).begin(), incoming(id).end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const std::set<ElementId>& ModelSpace::outgoing(ElementId id) const {
  auto it = outgoing_.find(id);
  return it == outgoing_.end() ? kEmpty : it->second;
}

const std::set<ElementId>& ModelSpace::incoming(ElementId id) const {
  auto it = incoming_.find(id);
  return it == incoming_.end() ? kEmpty : it->second;
}

const std::set<ElementId>& ModelSpace::children(ElementId id) const {
  auto it = children_.find(id);
  return it == children_.end() ? kEmpty : it->second;
}

std::optional<ElementId> ModelSpace::parent(ElementId id) const { return live(id).parent; }

const Value& ModelSpace::value(ElementId id) const { return live(id).value; }

const std::string& ModelSpace::name(ElementId id) const { return live(id).name; }

bool ModelSpace::conforms(ElementId id, TypeId type) const {
  for (TypeId t : live(id).types)
    if (types_.is_subtype(t, type)) return true;
  return false;
}

bool ModelSpace::contained_in(ElementId id, ElementId ancestor) const {
  for (auto p = live(id).parent; p; p = live(*p).parent)
    if (*p == ancestor) return true;
  return false;
}

std::vector<ElementId> ModelSpace::all_elements(bool include_root) const {
  std::vector<ElementId> out;
  out.reserve(elements_.size());
  for (const auto& [id, _] : elements_)
    if (include_root || id != kRootId) out.push_back(id);
  return out;
}

std::vector<std::string> ModelSpace::audit() const {
  std::vector<std::string> problems;
  for (const auto& [id, e] : elements_) {
    if (e.is_relation()) {
      if (!is_live(e.source)) problems.push_back(describe(id) + " has dead source");
      if (!is_live(e.target)) problems.push_back(describe(id) + " has dead target");
      if (e.parent) problems.push_back(describe(id) + " is a contained relation");
    }
    if (e.parent) {
      auto it = elements_.find(*e.parent);
      if (it == elements_.end())
        problems.push_back(describe(id) + " has dead parent");
      else if (it->second.is_relation())
        problems.push_back(describe(id) + " has a relation as parent");
    } else if (id != kRootId && !e.is_relation()) {
      problems.push_back(describe(id) + " is detached from the root");
    }
    for (TypeId t : e.types) {
      if (!types_.contains(t)) {
        problems.push_back(describe(id) + " has an unknown type");
        continue;
      }
      if ((types_.info(t).kind == TypeKind::Relation) != e.is_relation())
        problems.push_back(describe(id) + " has a type of the wrong kind");
    }
    // Acyclic containment: walking up must terminate at the root.
    std::size_t steps = 0;
    for (auto p = e.parent; p && steps <= elements_.size(); ++steps) {
      auto it = elements_.find(*p);
      if (it == elements_.end()) break;
      p = it->second.parent;
    }
    if (steps > elements_.size()) problems.push_back(describe(id) + " is on a containment cycle");
  }
  return problems;
}

Subscription ModelSpace::subscribe(Listener listener) {
  const auto id = next_listener_++;
  listeners_.emplace(id, std::move(listener));
  return Subscription(this, id);
}

void ModelSpace::unsubscribe(std::uint64_t id) { listeners_.erase(id); }

void ModelSpace::emit(const ChangeEvent& event) {
  for (auto& [_, listener] : listeners_) listener(event);
}

}  // namespace gtvm::model

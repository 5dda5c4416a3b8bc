#include "gtvm/matcher_inc/rete.hpp"

#include <algorithm>
#include <unordered_map>

#include "gtvm/error.hpp"
#include "gtvm/overloaded.hpp"

namespace gtvm::rete {

using pattern::CBody;
using pattern::CConstraint;
using pattern::Op;

using Memory = std::unordered_map<Tuple, int, TupleHash>;

namespace {

Tuple project(const Tuple& t, const std::vector<int>& positions) {
  Tuple out;
  out.reserve(positions.size());
  for (int p : positions) out.push_back(t[p]);
  return out;
}

void bump(Memory& m, const Tuple& t, int d) {
  auto it = m.find(t);
  if (it == m.end()) {
    if (d != 0) m.emplace(t, d);
    return;
  }
  it->second += d;
  if (it->second == 0) m.erase(it);
}

}  // namespace

// Every node keeps a counting memory of what it has emitted, so children
// attached later can be initialised by replay.
class Node {
 public:
  virtual ~Node() = default;
  virtual void receive(int port, const Tuple& t, int d) = 0;

  void attach(Node* child, int port) {
    children_.emplace_back(child, port);
    for (const auto& [t, c] : memory_) child->receive(port, t, c);
  }
  const Memory& memory() const { return memory_; }

 protected:
  void emit(const Tuple& t, int d) {
    if (d == 0) return;
    bump(memory_, t, d);
    for (auto [child, port] : children_) child->receive(port, t, d);
  }

 private:
  Memory memory_;
  std::vector<std::pair<Node*, int>> children_;
};

// Input nodes hold set semantics: a tuple is present or absent.
class InputNode : public Node {
 public:
  void receive(int, const Tuple&, int) override {}
  void set(const Tuple& t, bool present) {
    const bool now = memory().contains(t);
    if (present && !now) emit(t, 1);
    if (!present && now) emit(t, -1);
  }
};

class TypeAlpha : public InputNode {
 public:
  explicit TypeAlpha(TypeId t) : type(t) {}
  TypeId type;
};

class RelationAlpha : public InputNode {
 public:
  explicit RelationAlpha(std::optional<TypeId> t) : type(t) {}
  std::optional<TypeId> type;
};

class ContainmentAlpha : public InputNode {};

class UnitNode : public InputNode {};

// Checks repeated columns for equality and drops the duplicates.
class Adapter : public Node {
 public:
  explicit Adapter(std::vector<int> canonical) : canonical_(std::move(canonical)) {
    for (std::size_t i = 0; i < canonical_.size(); ++i)
      if (canonical_[i] == static_cast<int>(keep_.size())) keep_.push_back(static_cast<int>(i));
  }
  void receive(int, const Tuple& t, int d) override {
    for (std::size_t i = 0; i < canonical_.size(); ++i)
      if (t[i] != t[keep_[canonical_[i]]]) return;
    emit(project(t, keep_), d);
  }

 private:
  std::vector<int> canonical_;
  std::vector<int> keep_;
};

class Join : public Node {
 public:
  Join(std::vector<int> lkey, std::vector<int> rkey, std::vector<int> rextra)
      : lkey_(std::move(lkey)), rkey_(std::move(rkey)), rextra_(std::move(rextra)) {}

  void receive(int port, const Tuple& t, int d) override {
    const bool left = port == 0;
    Tuple key = project(t, left ? lkey_ : rkey_);
    auto& mine = left ? lmem_ : rmem_;
    bump(mine[key], t, d);
    if (mine[key].empty()) mine.erase(key);
    auto& other = left ? rmem_ : lmem_;
    auto it = other.find(key);
    if (it == other.end()) return;
    for (const auto& [o, c] : it->second) {
      const Tuple& l = left ? t : o;
      const Tuple& r = left ? o : t;
      Tuple out = l;
      for (int p : rextra_) out.push_back(r[p]);
      emit(out, d * c);
    }
  }

 private:
  std::vector<int> lkey_, rkey_, rextra_;
  std::unordered_map<Tuple, Memory, TupleHash> lmem_, rmem_;
};

// Negative application condition keyed on the bound arguments.
class AntiJoin : public Node {
 public:
  AntiJoin(std::vector<int> lkey, std::vector<int> rkey) : lkey_(std::move(lkey)), rkey_(std::move(rkey)) {}

  void receive(int port, const Tuple& t, int d) override {
    if (port == 0) {
      Tuple key = project(t, lkey_);
      bump(lmem_[key], t, d);
      if (lmem_[key].empty()) lmem_.erase(key);
      if (!rcount_.contains(key)) emit(t, d);
      return;
    }
    Tuple key = project(t, rkey_);
    const int before = rcount_.contains(key) ? rcount_[key] : 0;
    const int after = before + d;
    if (after == 0)
      rcount_.erase(key);
    else
      rcount_[key] = after;
    if ((before == 0) == (after == 0)) return;
    auto it = lmem_.find(key);
    if (it == lmem_.end()) return;
    for (const auto& [l, c] : it->second) emit(l, before == 0 ? -c : c);
  }

 private:
  std::vector<int> lkey_, rkey_;
  std::unordered_map<Tuple, Memory, TupleHash> lmem_;
  std::unordered_map<Tuple, int, TupleHash> rcount_;
};

// Match counting: appends (or, when already bound, compares) the number of
// distinct callee tuples agreeing with the key. Absent keys count as zero.
class CountJoin : public Node {
 public:
  CountJoin(std::vector<int> lkey, std::vector<int> rkey, int bound_pos)
      : lkey_(std::move(lkey)), rkey_(std::move(rkey)), bound_pos_(bound_pos) {}

  void receive(int port, const Tuple& t, int d) override {
    if (port == 0) {
      Tuple key = project(t, lkey_);
      bump(lmem_[key], t, d);
      if (lmem_[key].empty()) lmem_.erase(key);
      output(t, count_of(key), d);
      return;
    }
    Tuple key = project(t, rkey_);
    const std::int64_t before = count_of(key);
    bump(rmem_[key], t, d);
    if (rmem_[key].empty()) rmem_.erase(key);
    const std::int64_t after = count_of(key);
    if (before == after) return;
    auto it = lmem_.find(key);
    if (it == lmem_.end()) return;
    for (const auto& [l, c] : it->second) {
      output(l, before, -c);
      output(l, after, c);
    }
  }

 private:
  std::int64_t count_of(const Tuple& key) const {
    auto it = rmem_.find(key);
    return it == rmem_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
  }
  void output(const Tuple& l, std::int64_t n, int d) {
    if (bound_pos_ >= 0) {
      if (l[bound_pos_] == Value{n}) emit(l, d);
      return;
    }
    Tuple out = l;
    out.emplace_back(n);
    emit(out, d);
  }

  std::vector<int> lkey_, rkey_;
  int bound_pos_;
  std::unordered_map<Tuple, Memory, TupleHash> lmem_, rmem_;
};

// Injectivity: drops tuples where two listed columns hold the same element.
class DistinctFilter : public Node {
 public:
  explicit DistinctFilter(std::vector<std::pair<int, int>> pairs) : pairs_(std::move(pairs)) {}
  void receive(int, const Tuple& t, int d) override {
    for (auto [i, j] : pairs_)
      if (is_element(t[i]) && t[i] == t[j]) return;
    emit(t, d);
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
};

// Keeps its input so it can re-evaluate when a value or name changes.
class CheckFilter : public Node {
 public:
  CheckFilter(pattern::Expr expr, std::map<std::string, int> columns, const model::ModelSpace& space)
      : expr_(std::move(expr)), columns_(std::move(columns)), space_(space) {
    for (const auto& [_, c] : columns_) read_.push_back(c);
  }

  void receive(int, const Tuple& t, int d) override {
    auto it = input_.find(t);
    if (it == input_.end()) {
      const bool pass = evaluate(t);
      it = input_.emplace(t, std::make_pair(0, pass)).first;
    }
    it->second.first += d;
    const bool pass = it->second.second;
    if (it->second.first == 0) input_.erase(it);
    if (pass) emit(t, d);
  }

  void element_changed(ElementId id) {
    std::vector<std::pair<Tuple, int>> flips;
    for (auto& [t, state] : input_) {
      bool touches = false;
      for (int c : read_) touches = touches || t[c] == Value{id};
      if (!touches) continue;
      const bool pass = evaluate(t);
      if (pass == state.second) continue;
      state.second = pass;
      flips.emplace_back(t, pass ? state.first : -state.first);
    }
    for (const auto& [t, d] : flips) emit(t, d);
  }

 private:
  bool evaluate(const Tuple& t) const {
    auto lookup = [&](const std::string& name) -> Value { return t[columns_.at(name)]; };
    try {
      return pattern::truthy(pattern::evaluate(expr_, lookup, space_));
    } catch (const RuntimeError&) {
      return false;
    }
  }

  pattern::Expr expr_;
  std::map<std::string, int> columns_;
  std::vector<int> read_;
  const model::ModelSpace& space_;
  std::unordered_map<Tuple, std::pair<int, bool>, TupleHash> input_;
};

class Projection : public Node {
 public:
  explicit Projection(std::vector<int> positions) : positions_(std::move(positions)) {}
  void receive(int, const Tuple& t, int d) override { emit(project(t, positions_), d); }

 private:
  std::vector<int> positions_;
};

// Union of the bodies; emits presence changes only and logs them.
class Production : public Node {
 public:
  explicit Production(std::size_t pattern) : pattern(pattern) {}

  void receive(int, const Tuple& t, int d) override {
    int& c = counts_[t];
    const int before = c;
    c += d;
    const int after = c;
    if (after == 0) counts_.erase(t);
    if (before == 0 && after > 0) {
      log.emplace_back(t, true);
      emit(t, 1);
    } else if (before > 0 && after == 0) {
      log.emplace_back(t, false);
      emit(t, -1);
    }
  }

  std::size_t pattern;
  std::vector<std::pair<Tuple, bool>> log;

 private:
  std::unordered_map<Tuple, int, TupleHash> counts_;
};

// ---------------------------------------------------------------------------

ReteNetwork::ReteNetwork(const pattern::PatternLibrary& library, model::ModelSpace& space)
    : lib_(library), space_(space) {
  if (!lib_.validated()) throw ValidationError("pattern library must be validated before building a network");
  subscription_ = space_.subscribe([this](const model::ChangeEvent& ev) { on_change(ev); });
}

ReteNetwork::~ReteNetwork() = default;

bool ReteNetwork::supports(const pattern::PatternLibrary& library, std::size_t pattern) {
  return !library.at(pattern).needs_ls;
}

template <class T, class... Args>
T* ReteNetwork::make(Args&&... args) {
  auto node = std::make_unique<T>(std::forward<Args>(args)...);
  T* raw = node.get();
  nodes_.push_back(std::move(node));
  return raw;
}

void ReteNetwork::reset() {
  productions_.clear();
  slots_.clear();
  type_alphas_.clear();
  relation_alphas_.clear();
  adapters_.clear();
  checks_.clear();
  containment_ = nullptr;
  unit_ = nullptr;
  nodes_.clear();
  ++generation_;
}

PatternHandle ReteNetwork::register_pattern(std::string_view name) { return register_pattern(lib_.index(name)); }

PatternHandle ReteNetwork::register_pattern(std::size_t pattern) {
  if (!supports(lib_, pattern))
    throw ValidationError("pattern '" + lib_.at(pattern).name +
                          "' is recursive or marked @localsearch; use the local-search matcher");
  Production* prod = build_production(pattern);
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i] == prod) return PatternHandle{i, generation_};
  slots_.push_back(prod);
  return PatternHandle{slots_.size() - 1, generation_};
}

Production& ReteNetwork::production_of(PatternHandle h) const {
  if (h.generation != generation_ || h.slot >= slots_.size()) throw Error("stale pattern handle");
  return *slots_[h.slot];
}

std::vector<Tuple> ReteNetwork::matches(PatternHandle h) const {
  std::vector<Tuple> out;
  for (const auto& [t, _] : production_of(h).memory()) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t ReteNetwork::count(PatternHandle h) const { return production_of(h).memory().size(); }

std::size_t ReteNetwork::cursor(PatternHandle h) const { return production_of(h).log.size(); }

Delta ReteNetwork::delta_since(PatternHandle h, std::size_t cursor) const {
  const auto& log = production_of(h).log;
  if (cursor > log.size()) throw Error("delta cursor is ahead of the change log");
  std::map<Tuple, std::pair<bool, int>> net;  // first direction, flip count
  for (std::size_t i = cursor; i < log.size(); ++i) {
    auto [it, inserted] = net.try_emplace(log[i].first, log[i].second, 0);
    it->second.second++;
  }
  Delta d;
  for (const auto& [t, state] : net) {
    if (state.second % 2 == 0) continue;
    (state.first ? d.appeared : d.disappeared).push_back(t);
  }
  return d;
}

TypeAlpha* ReteNetwork::type_alpha(TypeId t) {
  if (auto it = type_alphas_.find(t); it != type_alphas_.end()) return it->second;
  auto* a = make<TypeAlpha>(t);
  for (ElementId id : space_.elements_of_type(t)) a->set({id}, true);
  type_alphas_.emplace(t, a);
  return a;
}

RelationAlpha* ReteNetwork::relation_alpha(std::optional<TypeId> t) {
  if (auto it = relation_alphas_.find(t); it != relation_alphas_.end()) return it->second;
  auto* a = make<RelationAlpha>(t);
  for (ElementId r : space_.relations()) {
    if (t && !space_.conforms(r, *t)) continue;
    const auto& e = space_.get(r);
    a->set({r, e.source, e.target}, true);
  }
  relation_alphas_.emplace(t, a);
  return a;
}

ContainmentAlpha* ReteNetwork::containment_alpha() {
  if (containment_) return containment_;
  containment_ = make<ContainmentAlpha>();
  for (ElementId x : space_.all_elements()) {
    if (space_.get(x).is_relation()) continue;
    for (auto p = space_.parent(x); p && *p != kRootId; p = space_.parent(*p)) containment_->set({x, *p}, true);
  }
  return containment_;
}

Node* ReteNetwork::unit() {
  if (unit_) return unit_;
  auto* u = make<UnitNode>();
  u->set({}, true);
  unit_ = u;
  return unit_;
}

Node* ReteNetwork::adapter(Node* source, const std::vector<int>& columns, std::vector<int>& schema) {
  std::vector<int> canonical;
  std::vector<int> seen;
  schema.clear();
  for (int v : columns) {
    auto it = std::find(seen.begin(), seen.end(), v);
    if (it == seen.end()) {
      canonical.push_back(static_cast<int>(seen.size()));
      seen.push_back(v);
      schema.push_back(v);
    } else {
      canonical.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  auto key = std::make_pair(source, canonical);
  if (auto it = adapters_.find(key); it != adapters_.end()) return it->second;
  auto* a = make<Adapter>(canonical);
  source->attach(a, 0);
  adapters_.emplace(key, a);
  return a;
}

Production* ReteNetwork::build_production(std::size_t pattern) {
  if (auto it = productions_.find(pattern); it != productions_.end()) return it->second;
  const auto& cp = lib_.at(pattern);
  // Callees first, so the production below is initialised from full memories.
  for (const auto& body : cp.bodies)
    for (const auto& c : body.constraints)
      if (c.op == Op::Find || c.op == Op::Neg || c.op == Op::Count) build_production(c.callee);
  auto* prod = make<Production>(pattern);
  for (std::size_t b = 0; b < cp.bodies.size(); ++b) build_body(pattern, b)->attach(prod, static_cast<int>(b));
  productions_.emplace(pattern, prod);
  return prod;
}

Node* ReteNetwork::build_body(std::size_t pattern, std::size_t b) {
  const auto& cp = lib_.at(pattern);
  const CBody& body = cp.bodies[b];
  Node* cur = nullptr;
  std::vector<int> schema;

  auto position = [&](int v) {
    auto it = std::find(schema.begin(), schema.end(), v);
    return it == schema.end() ? -1 : static_cast<int>(it - schema.begin());
  };
  auto source_for = [&](const CConstraint& c, std::vector<int>& cols) -> Node* {
    switch (c.op) {
      case Op::Type: cols = {c.a}; return type_alpha(c.type);
      case Op::In: cols = {c.a, c.b}; return containment_alpha();
      case Op::Rel: cols = {c.a, c.b, c.c}; return relation_alpha(c.type);
      case Op::RelAny: cols = {c.a, c.b, c.c}; return relation_alpha(std::nullopt);
      case Op::Find:
      case Op::Neg:
      case Op::Count: cols = c.args; return productions_.at(c.callee);
      case Op::Check: break;
    }
    return nullptr;
  };
  auto join_in = [&](Node* right, const std::vector<int>& rschema) {
    if (!cur) {
      cur = right;
      schema = rschema;
      return;
    }
    std::vector<int> lkey, rkey, rextra;
    for (std::size_t i = 0; i < rschema.size(); ++i) {
      int p = position(rschema[i]);
      if (p >= 0) {
        lkey.push_back(p);
        rkey.push_back(static_cast<int>(i));
      } else {
        rextra.push_back(static_cast<int>(i));
      }
    }
    auto* j = make<Join>(lkey, rkey, rextra);
    right->attach(j, 1);
    cur->attach(j, 0);
    for (int i : rextra) schema.push_back(rschema[i]);
    cur = j;
  };

  // Positive constraints, connected ones first.
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < body.constraints.size(); ++i) {
    Op op = body.constraints[i].op;
    if (op != Op::Neg && op != Op::Check && op != Op::Count) pending.push_back(i);
  }
  while (!pending.empty()) {
    auto pick = pending.begin();
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      auto outs = body.constraints[*it].outputs();
      if (std::any_of(outs.begin(), outs.end(), [&](int v) { return position(v) >= 0; })) {
        pick = it;
        break;
      }
    }
    const auto& c = body.constraints[*pick];
    pending.erase(pick);
    std::vector<int> cols, rschema;
    Node* src = source_for(c, cols);
    join_in(adapter(src, cols, rschema), rschema);
  }
  if (!cur) {
    cur = unit();
    schema.clear();
  }

  std::vector<std::pair<int, int>> pairs;
  for (const auto& g : body.distinct_groups)
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        if (position(g[i]) >= 0 && position(g[j]) >= 0) pairs.emplace_back(position(g[i]), position(g[j]));
  if (!pairs.empty()) {
    auto* f = make<DistinctFilter>(pairs);
    cur->attach(f, 0);
    cur = f;
  }

  auto keyed = [&](const CConstraint& c, Node*& right, std::vector<int>& lkey, std::vector<int>& rkey) {
    std::vector<int> cols, rschema;
    right = adapter(source_for(c, cols), cols, rschema);
    for (std::size_t i = 0; i < rschema.size(); ++i) {
      if (body.local[rschema[i]]) continue;
      lkey.push_back(position(rschema[i]));
      rkey.push_back(static_cast<int>(i));
    }
  };
  for (const auto& c : body.constraints) {
    if (c.op != Op::Count) continue;
    Node* right;
    std::vector<int> lkey, rkey;
    keyed(c, right, lkey, rkey);
    const int bound_pos = position(c.count_var);
    auto* cj = make<CountJoin>(lkey, rkey, bound_pos);
    right->attach(cj, 1);
    cur->attach(cj, 0);
    cur = cj;
    if (bound_pos < 0) schema.push_back(c.count_var);
  }
  for (const auto& c : body.constraints) {
    if (c.op != Op::Neg) continue;
    Node* right;
    std::vector<int> lkey, rkey;
    keyed(c, right, lkey, rkey);
    auto* aj = make<AntiJoin>(lkey, rkey);
    right->attach(aj, 1);
    cur->attach(aj, 0);
    cur = aj;
  }
  for (const auto& c : body.constraints) {
    if (c.op != Op::Check) continue;
    std::map<std::string, int> columns;
    for (int v : c.reads) columns[body.vars[v]] = position(v);
    auto* cf = make<CheckFilter>(c.expr, columns, space_);
    checks_.push_back(cf);
    cur->attach(cf, 0);
    cur = cf;
  }

  std::vector<int> params;
  for (std::size_t i = 0; i < cp.arity(); ++i) params.push_back(position(static_cast<int>(i)));
  auto* proj = make<Projection>(params);
  cur->attach(proj, 0);
  return proj;
}

void ReteNetwork::entity_types_changed(ElementId id, const std::set<TypeId>& before, const std::set<TypeId>& after) {
  const auto& reg = space_.types();
  auto conforms = [&](const std::set<TypeId>& types, TypeId target) {
    return std::any_of(types.begin(), types.end(), [&](TypeId t) { return reg.is_subtype(t, target); });
  };
  for (auto& [t, alpha] : type_alphas_) {
    const bool was = conforms(before, t);
    const bool now = conforms(after, t);
    if (was != now) alpha->set({id}, now);
  }
}

void ReteNetwork::relation_types_changed(const model::ModelElement& r, const std::set<TypeId>& before,
                                         const std::set<TypeId>& after) {
  const auto& reg = space_.types();
  auto conforms = [&](const std::set<TypeId>& types, TypeId target) {
    return std::any_of(types.begin(), types.end(), [&](TypeId t) { return reg.is_subtype(t, target); });
  };
  const Tuple tuple{r.id, r.source, r.target};
  for (auto& [t, alpha] : relation_alphas_) {
    if (!t) continue;
    const bool was = conforms(before, *t);
    const bool now = conforms(after, *t);
    if (was != now) alpha->set(tuple, now);
  }
}

void ReteNetwork::on_change(const model::ChangeEvent& event) {
  std::visit(
      Overloaded{
          [&](const model::ElementCreated& e) {
            const auto& el = e.element;
            if (el.is_relation()) {
              if (auto it = relation_alphas_.find(std::nullopt); it != relation_alphas_.end())
                it->second->set({el.id, el.source, el.target}, true);
              relation_types_changed(el, {}, el.types);
            } else {
              entity_types_changed(el.id, {}, el.types);
              if (containment_)
                for (auto p = el.parent; p && *p != kRootId; p = space_.parent(*p)) containment_->set({el.id, *p}, true);
            }
          },
          [&](const model::ElementDeleted& e) {
            const auto& el = e.element;
            if (el.is_relation()) {
              relation_types_changed(el, el.types, {});
              if (auto it = relation_alphas_.find(std::nullopt); it != relation_alphas_.end())
                it->second->set({el.id, el.source, el.target}, false);
            } else {
              if (containment_)
                for (auto p = el.parent; p && *p != kRootId; p = space_.parent(*p))
                  containment_->set({el.id, *p}, false);
              entity_types_changed(el.id, el.types, {});
            }
          },
          [&](const model::TypeAdded& e) {
            const auto& el = space_.get(e.subject);
            std::set<TypeId> before = el.types;
            before.erase(e.type);
            if (el.is_relation())
              relation_types_changed(el, before, el.types);
            else
              entity_types_changed(el.id, before, el.types);
          },
          [&](const model::TypeRemoved& e) {
            const auto& el = space_.get(e.subject);
            std::set<TypeId> before = el.types;
            before.insert(e.type);
            if (el.is_relation())
              relation_types_changed(el, before, el.types);
            else
              entity_types_changed(el.id, before, el.types);
          },
          [&](const model::ValueSet& e) {
            for (auto* c : checks_) c->element_changed(e.subject);
          },
          [&](const model::Renamed& e) {
            for (auto* c : checks_) c->element_changed(e.subject);
          },
          [&](const model::EndpointRetargeted& e) {
            const auto& el = space_.get(e.subject);
            Tuple old_tuple{el.id, el.source, el.target};
            (e.end == model::RelationEnd::Source ? old_tuple[1] : old_tuple[2]) = e.old_endpoint;
            const Tuple new_tuple{el.id, el.source, el.target};
            const auto& reg = space_.types();
            for (auto& [t, alpha] : relation_alphas_) {
              if (t && std::none_of(el.types.begin(), el.types.end(), [&](TypeId x) { return reg.is_subtype(x, *t); }))
                continue;
              alpha->set(old_tuple, false);
              alpha->set(new_tuple, true);
            }
          },
      },
      event);
}

}  // namespace gtvm::rete

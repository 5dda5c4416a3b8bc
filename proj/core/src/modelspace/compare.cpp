#include "gtvm/modelspace/compare.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gtvm::model {

namespace {

constexpr std::size_t kMaxReported = 20;

std::vector<std::string> type_names(const ModelSpace& s, const ModelElement& e) {
  std::vector<std::string> out;
  for (TypeId t : e.types) out.push_back(s.types().info(t).name);
  std::sort(out.begin(), out.end());
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

void note(DiffResult& r, std::string msg) {
  r.equal = false;
  if (r.differences.size() < kMaxReported) r.differences.push_back(std::move(msg));
}

DiffResult compare_strict(const ModelSpace& a, const ModelSpace& b, const DiffOptions& opt) {
  DiffResult r;
  auto ids_a = a.all_elements();
  auto ids_b = b.all_elements();
  for (ElementId id : ids_a)
    if (!b.is_live(id)) note(r, "element " + std::to_string(id.value) + " only in first");
  for (ElementId id : ids_b)
    if (!a.is_live(id)) note(r, "element " + std::to_string(id.value) + " only in second");
  for (ElementId id : ids_a) {
    if (!b.is_live(id)) continue;
    const auto& x = a.get(id);
    const auto& y = b.get(id);
    const std::string where = "element " + std::to_string(id.value) + ": ";
    if (x.kind != y.kind) note(r, where + "kind differs");
    if (type_names(a, x) != type_names(b, y))
      note(r, where + "types " + join(type_names(a, x)) + " vs " + join(type_names(b, y)));
    if (x.name != y.name) note(r, where + "name '" + x.name + "' vs '" + y.name + "'");
    if (x.value != y.value) note(r, where + "value " + to_literal(x.value) + " vs " + to_literal(y.value));
    if (!opt.ignore_containment && x.parent != y.parent) note(r, where + "parent differs");
    if (x.is_relation() && y.is_relation() && (x.source != y.source || x.target != y.target))
      note(r, where + "endpoints differ");
  }
  return r;
}

// Isomorphism up to id renaming: colour refinement, then backtracking.
class Iso {
 public:
  Iso(const ModelSpace& a, const ModelSpace& b, const DiffOptions& opt) : a_(a), b_(b), opt_(opt) {}

  DiffResult run() {
    DiffResult r;
    ea_ = a_.all_elements();
    eb_ = b_.all_elements();
    if (ea_.size() != eb_.size()) {
      note(r, "element count " + std::to_string(ea_.size()) + " vs " + std::to_string(eb_.size()));
      return r;
    }
    refine();
    std::map<int, std::pair<int, int>> hist;
    for (ElementId id : ea_) hist[ca_[id]].first++;
    for (ElementId id : eb_) hist[cb_[id]].second++;
    for (const auto& [color, counts] : hist)
      if (counts.first != counts.second) {
        note(r, "no counterpart for " + describe_color(color) + " (" + std::to_string(counts.first) + " vs " +
                    std::to_string(counts.second) + ")");
      }
    if (!r.equal) return r;

    for (ElementId id : eb_) by_color_b_[cb_[id]].push_back(id);
    order_ = ea_;
    std::stable_sort(order_.begin(), order_.end(), [&](ElementId x, ElementId y) {
      return by_color_b_[ca_[x]].size() < by_color_b_[ca_[y]].size();
    });
    map_[kRootId] = kRootId;
    used_.insert(kRootId);
    if (!search(0)) note(r, "no structure-preserving bijection exists");
    return r;
  }

 private:
  std::string local_signature(const ModelSpace& s, const ModelElement& e) const {
    std::ostringstream os;
    os << (e.is_relation() ? 'R' : 'E') << '|' << join(type_names(s, e)) << '|' << to_literal(e.value) << '|';
    if (e.name != auto_name(e.kind, e.id)) os << quote_string(e.name);
    return os.str();
  }

  std::string describe_color(int color) const {
    for (ElementId id : ea_)
      if (ca_.at(id) == color) return "first's element " + std::to_string(id.value) + " " + local_signature(a_, a_.get(id));
    for (ElementId id : eb_)
      if (cb_.at(id) == color) return "second's element " + std::to_string(id.value) + " " + local_signature(b_, b_.get(id));
    return "element class";
  }

  int intern(const std::string& sig) {
    auto [it, inserted] = dict_.emplace(sig, static_cast<int>(dict_.size()));
    return it->second;
  }

  std::string neighbourhood(const ModelSpace& s, std::unordered_map<ElementId, int>& c, ElementId id) {
    const auto& e = s.get(id);
    std::ostringstream os;
    os << c[id] << '|';
    if (!opt_.ignore_containment) os << (e.parent ? (*e.parent == kRootId ? -1 : c[*e.parent]) : -2) << '|';
    if (e.is_relation()) os << c[e.source] << '>' << c[e.target] << '|';
    auto collect = [&](const std::set<ElementId>& ids) {
      std::vector<int> v;
      for (ElementId x : ids) v.push_back(c[x]);
      std::sort(v.begin(), v.end());
      for (int x : v) os << x << ',';
      os << '|';
    };
    collect(s.outgoing(id));
    collect(s.incoming(id));
    if (!opt_.ignore_containment) collect(s.children(id));
    return os.str();
  }

  void refine() {
    for (ElementId id : ea_) {
      ca_[id] = intern(local_signature(a_, a_.get(id)));
    }
    for (ElementId id : eb_) {
      cb_[id] = intern(local_signature(b_, b_.get(id)));
    }
    ca_[kRootId] = cb_[kRootId] = -1;
    std::size_t classes = dict_.size();
    for (std::size_t round = 0; round < ea_.size() + 1; ++round) {
      dict_.clear();
      std::unordered_map<ElementId, int> na, nb;
      for (ElementId id : ea_) na[id] = intern(neighbourhood(a_, ca_, id));
      for (ElementId id : eb_) nb[id] = intern(neighbourhood(b_, cb_, id));
      na[kRootId] = nb[kRootId] = -1;
      ca_.swap(na);
      cb_.swap(nb);
      if (dict_.size() == classes) break;
      classes = dict_.size();
    }
  }

  bool consistent(ElementId x, ElementId y) {
    const auto& ex = a_.get(x);
    const auto& ey = b_.get(y);
    auto mapped = [&](ElementId v) -> std::optional<ElementId> {
      auto it = map_.find(v);
      if (it == map_.end()) return std::nullopt;
      return it->second;
    };
    if (!opt_.ignore_containment) {
      if (ex.parent.has_value() != ey.parent.has_value()) return false;
      if (ex.parent) {
        if (auto p = mapped(*ex.parent); p && *p != *ey.parent) return false;
      }
      for (ElementId c : a_.children(x))
        if (auto m = mapped(c); m && b_.get(*m).parent != y) return false;
    }
    if (ex.is_relation()) {
      if (ex.source == x ? ey.source != y : false) return false;
      if (ex.target == x ? ey.target != y : false) return false;
      if (auto s = mapped(ex.source); s && *s != ey.source) return false;
      if (auto t = mapped(ex.target); t && *t != ey.target) return false;
    }
    for (ElementId r : a_.outgoing(x))
      if (auto m = mapped(r); m && b_.get(*m).source != y) return false;
    for (ElementId r : a_.incoming(x))
      if (auto m = mapped(r); m && b_.get(*m).target != y) return false;
    return true;
  }

  bool search(std::size_t k) {
    if (k == order_.size()) return true;
    if (++steps_ > kStepLimit) return false;
    ElementId x = order_[k];
    for (ElementId y : by_color_b_[ca_[x]]) {
      if (used_.contains(y) || !consistent(x, y)) continue;
      map_[x] = y;
      used_.insert(y);
      if (search(k + 1)) return true;
      map_.erase(x);
      used_.erase(y);
    }
    return false;
  }

  static constexpr std::size_t kStepLimit = 5'000'000;

  const ModelSpace& a_;
  const ModelSpace& b_;
  DiffOptions opt_;
  std::vector<ElementId> ea_, eb_, order_;
  std::unordered_map<std::string, int> dict_;
  std::unordered_map<ElementId, int> ca_, cb_;
  std::unordered_map<int, std::vector<ElementId>> by_color_b_;
  std::unordered_map<ElementId, ElementId> map_;
  std::set<ElementId> used_;
  std::size_t steps_ = 0;
};

}  // namespace

DiffResult compare(const ModelSpace& a, const ModelSpace& b, const DiffOptions& options) {
  if (!options.ignore_ids) return compare_strict(a, b, options);
  return Iso(a, b, options).run();
}

}  // namespace gtvm::model

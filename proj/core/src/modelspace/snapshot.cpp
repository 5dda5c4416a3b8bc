#include "gtvm/modelspace/snapshot.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "gtvm/error.hpp"

namespace gtvm::model {

namespace {

std::string type_list(const ModelSpace& space, const ModelElement& e) {
  std::string out;
  for (TypeId t : e.types) {
    if (!out.empty()) out += ',';
    out += space.types().info(t).name;
  }
  return out;
}

void write_common_tail(std::ostream& out, const ModelElement& e) {
  if (e.name != auto_name(e.kind, e.id)) out << " name=" << quote_string(e.name);
  if (const auto* s = std::get_if<std::string>(&e.value))
    out << " value=" << quote_string(*s);
  else if (const auto* i = std::get_if<std::int64_t>(&e.value))
    out << " value=" << *i;
}

// Line-level cursor for the reader.
class LineReader {
 public:
  LineReader(const std::string& line, int line_no) : s_(line), line_(line_no) {}

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool done() {
    skip_ws();
    return i_ >= s_.size();
  }
  bool peek(char c) {
    skip_ws();
    return i_ < s_.size() && s_[i_] == c;
  }
  bool peek_word(std::string_view w) {
    skip_ws();
    if (s_.compare(i_, w.size(), w) != 0) return false;
    std::size_t j = i_ + w.size();
    return j >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_');
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  void expect_str(std::string_view w) {
    skip_ws();
    if (s_.compare(i_, w.size(), w) != 0) fail("expected '" + std::string(w) + "'");
    i_ += w.size();
  }
  std::string word() {
    skip_ws();
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '.')) ++i_;
    if (start == i_) fail("expected a name");
    return s_.substr(start, i_ - start);
  }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = i_;
    if (i_ < s_.size() && s_[i_] == '-') ++i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_ || (i_ == start + 1 && s_[start] == '-')) fail("expected an integer");
    return std::stoll(s_.substr(start, i_ - start));
  }
  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') break;
      if (c == '\\') {
        if (i_ >= s_.size()) fail("unterminated escape");
        char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail("unknown escape");
        }
      } else {
        out += c;
      }
    }
    return out;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, SourcePos{line_, static_cast<int>(i_) + 1});
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
};

std::set<TypeId> read_types(LineReader& r, const TypeRegistry& types) {
  std::set<TypeId> out;
  if (r.peek('(') || r.done() || r.peek_word("in") || r.peek_word("name") || r.peek_word("value")) return out;
  while (true) {
    std::string name = r.word();
    auto id = types.find(name);
    if (!id) r.fail("unknown type '" + name + "'");
    out.insert(*id);
    if (!r.peek(',')) break;
    r.expect(',');
  }
  return out;
}

void read_tail(LineReader& r, ModelElement& e) {
  while (!r.done()) {
    if (r.peek_word("name")) {
      r.expect_str("name");
      r.expect('=');
      e.name = r.quoted();
    } else if (r.peek_word("value")) {
      r.expect_str("value");
      r.expect('=');
      if (r.peek('"'))
        e.value = r.quoted();
      else
        e.value = r.integer();
    } else {
      r.fail("unexpected trailing input");
    }
  }
}

}  // namespace

void write_snapshot(const ModelSpace& space, std::ostream& out) {
  const auto& types = space.types();
  for (TypeId t : types.all()) {
    const auto& info = types.info(t);
    if (info.builtin) continue;
    out << "type " << info.name << (info.kind == TypeKind::Entity ? " entity" : " relation");
    if (info.supertype) out << " extends " << types.info(*info.supertype).name;
    out << '\n';
  }

  // Entities parent-first, siblings in id order.
  std::function<void(ElementId)> visit = [&](ElementId parent) {
    for (ElementId child : space.children(parent)) {
      const auto& e = space.get(child);
      out << "entity " << e.id.value << " :";
      if (!e.types.empty()) out << ' ' << type_list(space, e);
      if (e.parent && *e.parent != kRootId) out << " in " << e.parent->value;
      write_common_tail(out, e);
      out << '\n';
      visit(child);
    }
  };
  visit(kRootId);

  // Relations after their endpoints (endpoints may themselves be relations).
  std::set<ElementId> written;
  std::function<void(ElementId)> emit_rel = [&](ElementId id) {
    if (written.contains(id)) return;
    written.insert(id);
    const auto& r = space.get(id);
    if (space.get(r.source).is_relation()) emit_rel(r.source);
    if (space.get(r.target).is_relation()) emit_rel(r.target);
    out << "relation " << r.id.value << " :";
    if (!r.types.empty()) out << ' ' << type_list(space, r);
    out << " (" << r.source.value << " -> " << r.target.value << ")";
    write_common_tail(out, r);
    out << '\n';
  };
  for (ElementId id : space.relations()) emit_rel(id);
}

std::string to_snapshot(const ModelSpace& space) {
  std::ostringstream os;
  write_snapshot(space, os);
  return os.str();
}

ModelSpace read_snapshot(std::istream& in, TypeRegistry base) {
  ModelSpace space(std::move(base));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      // '#' inside a quoted string is data, not a comment.
      bool quoted = false;
      std::size_t cut = std::string::npos;
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && quoted) {
          ++i;
        } else if (line[i] == '"') {
          quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
          cut = i;
          break;
        }
      }
      if (cut != std::string::npos) line.resize(cut);
    }
    LineReader r(line, line_no);
    if (r.done()) continue;
    std::string directive = r.word();
    try {
      if (directive == "type") {
        std::string name = r.word();
        std::string kind_word = r.word();
        TypeKind kind;
        if (kind_word == "entity")
          kind = TypeKind::Entity;
        else if (kind_word == "relation")
          kind = TypeKind::Relation;
        else
          r.fail("expected 'entity' or 'relation'");
        std::optional<TypeId> super;
        if (!r.done()) {
          r.expect_str("extends");
          std::string sname = r.word();
          super = space.types().find(sname);
          if (!super) r.fail("unknown supertype '" + sname + "'");
        }
        if (!r.done()) r.fail("unexpected trailing input");
        if (auto existing = space.types().find(name)) {
          const auto& info = space.types().info(*existing);
          if (info.kind != kind || info.supertype != super) r.fail("conflicting redefinition of type '" + name + "'");
        } else {
          space.types().add(name, kind, super);
        }
      } else if (directive == "entity") {
        ModelElement e;
        e.kind = ElementKind::Entity;
        e.id = ElementId{static_cast<std::uint64_t>(r.integer())};
        r.expect(':');
        e.types = read_types(r, space.types());
        if (r.peek_word("in")) {
          r.expect_str("in");
          e.parent = ElementId{static_cast<std::uint64_t>(r.integer())};
        }
        e.name = auto_name(e.kind, e.id);
        read_tail(r, e);
        if (!e.parent) e.parent = kRootId;
        space.restore(e);
      } else if (directive == "relation") {
        ModelElement e;
        e.kind = ElementKind::Relation;
        e.id = ElementId{static_cast<std::uint64_t>(r.integer())};
        r.expect(':');
        e.types = read_types(r, space.types());
        r.expect('(');
        e.source = ElementId{static_cast<std::uint64_t>(r.integer())};
        r.expect_str("->");
        e.target = ElementId{static_cast<std::uint64_t>(r.integer())};
        r.expect(')');
        e.name = auto_name(e.kind, e.id);
        read_tail(r, e);
        space.restore(e);
      } else {
        r.fail("unknown directive '" + directive + "'");
      }
    } catch (const ModelError& err) {
      throw ParseError(err.what(), SourcePos{line_no, 1});
    }
  }
  return space;
}

ModelSpace from_snapshot(const std::string& text, TypeRegistry base) {
  std::istringstream is(text);
  return read_snapshot(is, std::move(base));
}

ModelSpace load_snapshot_file(const std::string& path, TypeRegistry base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return read_snapshot(in, std::move(base));
}

void save_snapshot_file(const ModelSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file '" + path + "'");
  write_snapshot(space, out);
}

}  // namespace gtvm::model

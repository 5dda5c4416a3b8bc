#include <cctype>
#include <set>

#include "gtvm/vtcl/vtcl.hpp"

namespace gtvm::vtcl {

using namespace gtvm::rules;
using pattern::Constraint;
using pattern::Pattern;
using pattern::PatternBody;

namespace {

enum class Tok { Ident, Int, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) t.text += advance();
      } else if (c == '"') {
        t.kind = Tok::String;
        advance();
        while (true) {
          if (i_ >= src_.size() || src_[i_] == '\n') throw ParseError("unterminated string literal", t.pos);
          char d = advance();
          if (d == '"') break;
          if (d == '\\') {
            if (i_ >= src_.size()) throw ParseError("unterminated string literal", t.pos);
            char e = advance();
            switch (e) {
              case 'n': t.text += '\n'; break;
              case 't': t.text += '\t'; break;
              case '"': t.text += '"'; break;
              case '\\': t.text += '\\'; break;
              default: throw ParseError(std::string("unknown escape '\\") + e + "'", {line_, col_ - 2});
            }
            continue;
          }
          t.text += d;
        }
      } else {
        t.kind = Tok::Punct;
        if ((c == '=' || c == '!') && i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          t.text += advance();
          t.text += advance();
        } else if (std::string_view("(){},;=+#@.").find(c) != std::string_view::npos) {
          t.text += advance();
        } else {
          throw ParseError(std::string("unexpected character '") + c + "'", t.pos);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (src_.substr(i_, 2) == "/*") {
        SourcePos start{line_, col_};
        advance();
        advance();
        while (i_ < src_.size() && src_.substr(i_, 2) != "*/") advance();
        if (i_ >= src_.size()) throw ParseError("unterminated comment", start);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Machine machine() {
    Machine m;
    while (is_word("import")) {
      next();
      m.imports.push_back(dotted());
      expect(";");
    }
    while (is("@")) {
      next();
      m.annotations.push_back(ident());
    }
    m.pos = peek().pos;
    expect_word("machine");
    m.name = ident();
    expect("{");
    std::set<std::string> patterns, rules;
    while (!is("}")) {
      std::vector<std::string> annotations;
      std::vector<SourcePos> where;
      while (is("@")) {
        next();
        where.push_back(peek().pos);
        annotations.push_back(ident());
      }
      if (is_word("rule")) {
        if (!annotations.empty()) throw ParseError("annotations are not allowed on rules", where.front());
        next();
        AsmRule r = asm_rule();
        if (!rules.insert(r.name).second) throw ParseError("duplicate rule '" + r.name + "'", r.pos);
        m.rules.push_back(std::move(r));
      } else if (is_word("gtrule")) {
        if (!annotations.empty()) throw ParseError("annotations are not allowed on gtrules", where.front());
        next();
        GtRule r = gt_rule();
        if (!rules.insert(r.name).second) throw ParseError("duplicate rule '" + r.name + "'", r.pos);
        m.gtrules.push_back(std::move(r));
      } else {
        Pattern p = pattern_decl(annotations, where);
        if (!patterns.insert(p.name).second) throw ParseError("duplicate pattern '" + p.name + "'", p.pos);
        m.patterns.push_back(std::move(p));
      }
    }
    expect("}");
    if (peek().kind != Tok::End) fail("text after the end of the machine");
    return m;
  }

 private:
  // Token helpers ----------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  const Token& next() { return t_[std::min(p_++, t_.size() - 1)]; }
  bool is(std::string_view punct, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == punct;
  }
  bool is_word(std::string_view w, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == w; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

  std::string describe(const Token& t) const {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      case Tok::Int: return "'" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }

  void expect(std::string_view punct) {
    if (!is(punct)) fail("expected '" + std::string(punct) + "', found " + describe(peek()));
    next();
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "', found " + describe(peek()));
    next();
  }
  bool accept(std::string_view punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected an identifier, found " + describe(peek()));
    return next().text;
  }

  std::string dotted() {
    std::string s = ident();
    while (is(".")) {
      next();
      s += "." + ident();
    }
    return s;
  }

  std::vector<std::string> ident_list(std::string_view close) {
    std::vector<std::string> out;
    if (is(close)) return out;
    out.push_back(ident());
    while (accept(",")) out.push_back(ident());
    return out;
  }

  // Patterns ---------------------------------------------------------------

  Pattern pattern_decl(const std::vector<std::string>& annotations, const std::vector<SourcePos>& where) {
    Pattern p;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      if (annotations[i] != "localsearch") throw ParseError("unknown pattern annotation '@" + annotations[i] + "'", where[i]);
      p.localsearch = true;
    }
    if (is_word("shareable")) {
      next();
      p.shareable = true;
    }
    expect_word("pattern");
    pattern_def(p);
    return p;
  }

  void pattern_def(Pattern& p) {
    p.pos = peek().pos;
    p.name = ident();
    expect("(");
    p.params = ident_list(")");
    expect(")");
    expect("=");
    p.bodies.push_back(body());
    while (is_word("or")) {
      next();
      p.bodies.push_back(body());
    }
  }

  PatternBody body() {
    PatternBody b;
    expect("{");
    while (!is("}")) b.constraints.push_back(constraint());
    expect("}");
    return b;
  }

  Constraint constraint() {
    const SourcePos pos = peek().pos;
    if (is_word("neg")) {
      next();
      if (is_word("pattern")) {
        next();
        Pattern inner;
        pattern_def(inner);
        accept(";");
        pattern::NegFind n;
        n.pattern = {inner.name};
        n.args = inner.params;
        n.inline_def = Box<Pattern>(std::move(inner));
        n.pos = pos;
        return n;
      }
      expect_word("find");
      pattern::NegFind n;
      n.pattern = {dotted()};
      n.args = call_args();
      n.pos = pos;
      expect(";");
      return n;
    }
    if (is_word("find")) {
      next();
      std::string name = dotted();
      auto args = call_args();
      if (accept("#")) {
        pattern::CountFind c{{name}, std::move(args), ident(), pos};
        expect(";");
        return c;
      }
      expect(";");
      return pattern::FindCall{{name}, std::move(args), pos};
    }
    if (is_word("check") && is("(", 1)) {
      next();
      expect("(");
      pattern::Check c{expr(), pos};
      expect(")");
      expect(";");
      return c;
    }
    if (is_word("relation") && is("(", 1)) {
      next();
      auto args = call_args();
      if (args.size() != 3) throw ParseError("relation(...) takes three variables", pos);
      expect(";");
      return pattern::RelationAny{args[0], args[1], args[2], pos};
    }
    std::string type = dotted();
    auto args = call_args();
    if (args.size() == 1) {
      pattern::EntityType e{{type}, args[0], std::nullopt, pos};
      if (is_word("in")) {
        next();
        e.container = dotted();
      }
      expect(";");
      return e;
    }
    if (args.size() == 3) {
      expect(";");
      return pattern::RelationTyped{{type}, args[0], args[1], args[2], pos};
    }
    throw ParseError("type constraint '" + type + "' takes one or three variables", pos);
  }

  std::vector<std::string> call_args() {
    expect("(");
    auto a = ident_list(")");
    expect(")");
    return a;
  }

  // Rules ------------------------------------------------------------------

  std::vector<Param> rule_params() {
    std::vector<Param> out;
    expect("(");
    if (!is(")")) {
      do {
        Param p;
        if (is_word("in") && peek(1).kind == Tok::Ident) {
          next();
          p.mode = ParamMode::In;
        } else if (is_word("out") && peek(1).kind == Tok::Ident) {
          next();
          p.mode = ParamMode::Out;
        }
        p.name = ident();
        out.push_back(p);
      } while (accept(","));
    }
    expect(")");
    return out;
  }

  AsmRule asm_rule() {
    AsmRule r;
    r.pos = peek().pos;
    r.name = ident();
    r.params = rule_params();
    expect("=");
    r.body = stmt();
    return r;
  }

  Condition condition() {
    if (is_word("pattern")) {
      next();
      Pattern p;
      pattern_def(p);
      return p;
    }
    const SourcePos pos = peek().pos;
    expect_word("find");
    pattern::FindCall f;
    f.pattern = {dotted()};
    f.args = call_args();
    f.pos = pos;
    accept(";");
    return f;
  }

  GtRule gt_rule() {
    GtRule r;
    r.pos = peek().pos;
    r.name = ident();
    r.params = rule_params();
    expect("=");
    expect("{");
    expect_word("precondition");
    r.precondition = condition();
    if (is_word("postcondition")) {
      next();
      r.postcondition = condition();
    }
    if (is_word("action")) {
      const SourcePos pos = peek().pos;
      next();
      expect("{");
      Seq s;
      while (!is("}")) s.body.push_back(stmt());
      expect("}");
      r.action = Stmt{std::move(s), pos};
    }
    expect("}");
    return r;
  }

  MatchSource source() {
    MatchSource s;
    if (is_word("find")) {
      s.kind = MatchSource::Kind::Find;
    } else if (is_word("apply")) {
      s.kind = MatchSource::Kind::Apply;
    } else {
      fail("expected 'find' or 'apply', found " + describe(peek()));
    }
    next();
    s.target = dotted();
    s.args = call_args();
    return s;
  }

  std::vector<std::string> bound_vars() {
    std::vector<std::string> v;
    if (is_word("with")) return v;
    v.push_back(ident());
    while (accept(",")) v.push_back(ident());
    return v;
  }

  Stmt stmt() {
    Stmt s;
    s.pos = peek().pos;
    s.node = stmt_node();
    accept(";");
    return s;
  }

  StmtNode stmt_node() {
    if (peek().kind != Tok::Ident) fail("expected a statement, found " + describe(peek()));
    const std::string kw = peek().text;
    if (kw == "seq") {
      next();
      expect("{");
      Seq q;
      while (!is("}")) q.body.push_back(stmt());
      expect("}");
      return q;
    }
    if (kw == "let") {
      next();
      Let l;
      do {
        LetBinding b;
        b.name = ident();
        expect("=");
        b.init = expr();
        l.vars.push_back(std::move(b));
      } while (accept(","));
      expect_word("in");
      l.body = stmt();
      return l;
    }
    if (kw == "update") {
      next();
      Update u;
      u.var = ident();
      expect("=");
      u.value = expr();
      return u;
    }
    if (kw == "if") {
      next();
      If i;
      expect("(");
      i.cond = expr();
      expect(")");
      i.then = stmt();
      if (is_word("else")) {
        next();
        i.otherwise = Box<Stmt>(stmt());
      }
      return i;
    }
    if (kw == "try") {
      next();
      return Try{stmt()};
    }
    if (kw == "choose" || kw == "forall") {
      next();
      auto vars = bound_vars();
      expect_word("with");
      MatchSource src = source();
      expect_word("do");
      Stmt body = stmt();
      if (kw == "choose") return Choose{std::move(vars), std::move(src), std::move(body)};
      return Forall{std::move(vars), std::move(src), std::move(body)};
    }
    if (kw == "iterate") {
      const SourcePos pos = peek().pos;
      next();
      Stmt body = stmt();
      if (!std::holds_alternative<Choose>(body.node)) throw ParseError("iterate expects a choose statement", pos);
      return Iterate{std::move(body)};
    }
    if (kw == "call") {
      next();
      Call c;
      c.rule = dotted();
      expect("(");
      if (!is(")")) {
        c.args.push_back(expr());
        while (accept(",")) c.args.push_back(expr());
      }
      expect(")");
      return c;
    }
    if (kw == "println") {
      next();
      expect("(");
      Println p{expr()};
      expect(")");
      return p;
    }
    if (kw == "skip") {
      next();
      return Skip{};
    }
    if (kw == "new") {
      next();
      expect("(");
      StmtNode n = new_target();
      expect(")");
      return n;
    }
    if (kw == "delete") {
      next();
      expect("(");
      StmtNode n;
      if (is_word("instanceOf") && is("(", 1)) {
        next();
        expect("(");
        DeleteInstanceOf d;
        d.var = ident();
        expect(",");
        d.type = {dotted()};
        expect(")");
        n = d;
      } else {
        n = Delete{ident()};
      }
      expect(")");
      return n;
    }
    if (kw == "setValue" || kw == "rename") {
      next();
      expect("(");
      std::string var = ident();
      expect(",");
      Expr e = expr();
      expect(")");
      if (kw == "setValue") return SetValue{var, std::move(e)};
      return Rename{var, std::move(e)};
    }
    if (kw == "setTo") {
      next();
      expect("(");
      SetTo st;
      st.rel = ident();
      expect(",");
      st.target = ident();
      expect(")");
      return st;
    }
    fail("unknown statement '" + kw + "'");
  }

  StmtNode new_target() {
    if (is_word("instanceOf") && is("(", 1)) {
      next();
      expect("(");
      NewInstanceOf n;
      n.var = ident();
      expect(",");
      n.type = {dotted()};
      expect(")");
      return n;
    }
    if (is_word("relation") && is("(", 1)) {
      next();
      const SourcePos pos = peek().pos;
      auto args = call_args();
      if (args.size() != 3) throw ParseError("relation(...) takes three variables", pos);
      return NewRelation{std::nullopt, args[0], args[1], args[2]};
    }
    const SourcePos pos = peek().pos;
    std::string type = dotted();
    auto args = call_args();
    if (args.size() == 1) {
      NewEntity n{{type}, args[0], std::nullopt};
      if (is_word("in")) {
        next();
        n.container = dotted();
      }
      return n;
    }
    if (args.size() == 3) return NewRelation{TypeRef{type}, args[0], args[1], args[2]};
    throw ParseError("new(" + type + "(...)) takes one or three variables", pos);
  }

  // Expressions ------------------------------------------------------------

  Expr expr() {
    Expr e = additive();
    while (is("==") || is("!=")) {
      const SourcePos pos = peek().pos;
      auto k = next().text == "==" ? Expr::Kind::Eq : Expr::Kind::Ne;
      e = Expr::binary(k, std::move(e), additive());
      e.pos = pos;
    }
    return e;
  }

  Expr additive() {
    Expr e = primary();
    while (is("+")) {
      const SourcePos pos = next().pos;
      e = Expr::binary(Expr::Kind::Add, std::move(e), primary());
      e.pos = pos;
    }
    return e;
  }

  Expr primary() {
    const Token& t = peek();
    Expr e;
    if (t.kind == Tok::String) {
      e = Expr::lit(Value{t.text});
      next();
    } else if (t.kind == Tok::Int) {
      try {
        e = Expr::lit(Value{static_cast<std::int64_t>(std::stoll(t.text))});
      } catch (const std::out_of_range&) {
        fail("integer literal out of range");
      }
      next();
    } else if (is("(")) {
      next();
      e = expr();
      expect(")");
      return e;
    } else if (t.kind == Tok::Ident) {
      if (t.text == "undef") {
        next();
        e = Expr::lit(Value{});
      } else if ((t.text == "value" || t.text == "name") && is("(", 1)) {
        const bool value = t.text == "value";
        next();
        expect("(");
        std::string v = ident();
        expect(")");
        e = value ? Expr::value_of(v) : Expr::name_of(v);
      } else {
        e = Expr::variable(next().text);
      }
    } else {
      fail("expected an expression, found " + describe(t));
    }
    e.pos = t.pos;
    return e;
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
};

}  // namespace

Machine parse(std::string_view source) { return Parser(Lexer(source).run()).machine(); }

}  // namespace gtvm::vtcl

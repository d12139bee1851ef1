#include <charconv>
#include <set>

#include "cognate/surface.hpp"

namespace cognate::surface {

namespace {

enum class Tok { Ident, Ctor, Int, Float, Str, Sym, Keyword, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {"let", "in", "fun", "if", "then", "else", "match", "with"};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool ctor_start(char c) { return c >= 'A' && c <= 'Z'; }
bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '\'';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span = {line_, col_};
      if (pos_ >= text_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (ident_start(c) || ctor_start(c)) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = ctor_start(c) ? Tok::Ctor : (kKeywords.count(t.text) ? Tok::Keyword : Tok::Ident);
      } else if (digit(c)) {
        number(t);
      } else if (c == '"') {
        string(t);
      } else {
        symbol(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void error(const std::string& msg, SourceSpan span) const { throw SyntaxError(msg, span); }

  void number(Token& t) {
    const std::size_t start = pos_;
    bool is_float = false;
    while (digit(peek())) advance();
    if (peek() == '.' && digit(peek(1))) {
      is_float = true;
      advance();
      while (digit(peek())) advance();
    }
    if ((peek() == 'e' || peek() == 'E') && (digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && digit(peek(2))))) {
      is_float = true;
      advance();
      if (peek() == '-' || peek() == '+') advance();
      while (digit(peek())) advance();
    }
    const std::string_view s = text_.substr(start, pos_ - start);
    if (is_float) {
      t.kind = Tok::Float;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), t.float_value);
      if (ec != std::errc() || p != s.data() + s.size()) error("malformed number " + std::string(s), t.span);
    } else {
      t.kind = Tok::Int;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), t.int_value);
      if (ec != std::errc() || p != s.data() + s.size()) error("integer literal out of range " + std::string(s), t.span);
    }
    t.text = std::string(s);
  }

  void string(Token& t) {
    t.kind = Tok::Str;
    advance();
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') error("unterminated string literal", t.span);
      const char c = peek();
      advance();
      if (c == '"') break;
      if (c == '\\') {
        const char e = peek();
        if (pos_ >= text_.size()) error("unterminated string literal", t.span);
        advance();
        switch (e) {
          case 'n': t.text += '\n'; break;
          case 't': t.text += '\t'; break;
          case '"': t.text += '"'; break;
          case '\\': t.text += '\\'; break;
          default: error(std::string("unknown escape \\") + e, t.span);
        }
      } else {
        t.text += c;
      }
    }
  }

  void symbol(Token& t) {
    static const char* const kTwo[] = {"->", "==", "!=", "<=", ">=", "++", "&&", "||"};
    t.kind = Tok::Sym;
    for (const char* s : kTwo) {
      if (peek() == s[0] && peek(1) == s[1]) {
        t.text = s;
        advance();
        advance();
        return;
      }
    }
    static const std::string_view kOne = "()[]{},;:.=<>+-*/%^";
    if (kOne.find(peek()) == std::string_view::npos) error(std::string("unexpected character '") + peek() + "'", t.span);
    t.text = std::string(1, peek());
    advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SExprPtr make(SExpr::Node node, SourceSpan span) { return std::make_shared<const SExpr>(std::move(node), span); }

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ConstructorSig& sig) : toks_(std::move(tokens)), sig_(sig) {}

  Program program() {
    Program prog;
    while (!at_end()) {
      // `data` is only special in a declaration, so it can also name a dataset.
      if (peek().kind == Tok::Ident && peek().text == "data" && peek(1).kind == Tok::Ident && is_sym(";", 2)) {
        Binding b;
        b.kind = Binding::Kind::Data;
        b.span = next().span;
        b.name = expect_ident("dataset name");
        expect_sym(";");
        prog.items.push_back(std::move(b));
        continue;
      }
      if (is_keyword("let")) {
        const std::size_t save = pos_;
        // A let block ending in `in` is the result expression.
        try {
          SExprPtr e = let_expr();
          if (is_sym(";")) next();
          if (at_end()) {
            prog.main = std::move(e);
            continue;
          }
        } catch (const SyntaxError&) {
        }
        pos_ = save;
        next();
        Binding b = binding();
        if (is_sym(";")) {
          next();
          prog.items.push_back(std::move(b));
          continue;
        }
        pos_ = save;
      } else if (peek().kind == Tok::Ident && definition_ahead()) {
        Binding b = binding();
        expect_sym(";");
        prog.items.push_back(std::move(b));
        continue;
      }
      prog.main = expr();
      if (is_sym(";")) next();
      if (!at_end()) fail("expected end of program after the result expression");
    }
    if (!prog.main) throw SyntaxError("program has no result expression", peek().span);
    return prog;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(std::string_view s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_keyword(std::string_view s) const { return peek().kind == Tok::Keyword && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg + describe_next(), peek().span); }

  std::string describe_next() const {
    const Token& t = peek();
    if (t.kind == Tok::End) return " (found end of input)";
    if (t.kind == Tok::Str) return " (found string literal)";
    return " (found '" + t.text + "')";
  }

  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "'");
    next();
  }
  void expect_keyword(std::string_view s) {
    if (!is_keyword(s)) fail("expected '" + std::string(s) + "'");
    next();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident || peek().text == "_") fail(std::string("expected ") + what);
    return next().text;
  }

  // A top-level item is a definition when an '=' occurs before the next ';'
  // outside brackets.
  bool definition_ahead() const {
    int depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind == Tok::End) return false;
      if (t.kind == Tok::Keyword) return false;
      if (t.kind != Tok::Sym) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ";") return false;
      if (depth == 0 && t.text == "=") return true;
      if (depth == 0 && t.text == "->") return false;
    }
    return false;
  }

  bool starts_atom() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: return t.text != "_";
      case Tok::Ctor:
      case Tok::Int:
      case Tok::Float:
      case Tok::Str: return true;
      case Tok::Sym: return t.text == "(" || t.text == "[" || t.text == "{";
      default: return false;
    }
  }

  bool starts_apat() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
      case Tok::Ctor:
      case Tok::Int:
      case Tok::Float:
      case Tok::Str: return true;
      case Tok::Sym: return t.text == "(" || t.text == "[" || t.text == "{" || (t.text == "-" && (peek(1).kind == Tok::Int || peek(1).kind == Tok::Float));
      default: return false;
    }
  }

  // name apat* = e   |   pattern = e
  Binding binding() {
    Binding b;
    b.span = peek().span;
    if (peek().kind == Tok::Ident && peek().text != "_") {
      const std::string name = next().text;
      std::vector<Pattern> params;
      while (!is_sym("=")) {
        if (!starts_apat()) fail("expected a parameter pattern or '='");
        params.push_back(apat());
      }
      next();
      SExprPtr body = expr();
      if (params.empty()) {
        b.kind = Binding::Kind::Value;
        b.pattern.kind = Pattern::Kind::Var;
        b.pattern.name = name;
        b.pattern.span = b.span;
        b.value = std::move(body);
      } else {
        b.kind = Binding::Kind::Function;
        b.def.name = name;
        b.def.span = b.span;
        b.def.clauses.push_back(Clause{std::move(params), std::move(body), b.span});
      }
      return b;
    }
    b.kind = Binding::Kind::Value;
    b.pattern = pattern();
    expect_sym("=");
    b.value = expr();
    return b;
  }

  // --- expressions -------------------------------------------------------

  SExprPtr expr() { return or_expr(); }

  SExprPtr binary(SExprPtr lhs, const Token& op, SExprPtr rhs) {
    return make(sx::BinOp{op.text, std::move(lhs), std::move(rhs)}, op.span);
  }

  SExprPtr or_expr() {
    SExprPtr e = and_expr();
    while (is_sym("||")) {
      const Token op = next();
      e = binary(e, op, and_expr());
    }
    return e;
  }

  SExprPtr and_expr() {
    SExprPtr e = cmp_expr();
    while (is_sym("&&")) {
      const Token op = next();
      e = binary(e, op, cmp_expr());
    }
    return e;
  }

  SExprPtr cmp_expr() {
    SExprPtr e = append_expr();
    for (const char* s : {"==", "!=", "<", "<=", ">", ">="}) {
      if (is_sym(s)) {
        const Token op = next();
        e = binary(e, op, append_expr());
        for (const char* t : {"==", "!=", "<", "<=", ">", ">="}) {
          if (is_sym(t)) fail("comparison operators do not associate; add parentheses");
        }
        break;
      }
    }
    return e;
  }

  SExprPtr append_expr() {
    SExprPtr e = cons_expr();
    while (is_sym("++")) {
      const Token op = next();
      e = binary(e, op, cons_expr());
    }
    return e;
  }

  SExprPtr cons_expr() {
    SExprPtr head = add_expr();
    if (is_sym(":")) {
      const SourceSpan span = next().span;
      SExprPtr tail = cons_expr();
      return make(sx::Constr{"Cons", {std::move(head), std::move(tail)}}, span);
    }
    return head;
  }

  SExprPtr add_expr() {
    SExprPtr e = mul_expr();
    while (is_sym("+") || is_sym("-")) {
      const Token op = next();
      e = binary(e, op, mul_expr());
    }
    return e;
  }

  SExprPtr mul_expr() {
    SExprPtr e = pow_expr();
    while (is_sym("*") || is_sym("/") || is_sym("%")) {
      const Token op = next();
      e = binary(e, op, pow_expr());
    }
    return e;
  }

  SExprPtr pow_expr() {
    SExprPtr base = unary();
    if (is_sym("^")) {
      const Token op = next();
      return binary(base, op, pow_expr());
    }
    return base;
  }

  SExprPtr unary() {
    if (is_sym("-")) {
      const SourceSpan span = next().span;
      if (peek().kind == Tok::Int && !is_sym(".", 1)) {
        const Token t = next();
        return postfix_from(make(sx::Int{-t.int_value}, span));
      }
      if (peek().kind == Tok::Float) {
        const Token t = next();
        return postfix_from(make(sx::Float{-t.float_value}, span));
      }
      return make(sx::Neg{unary()}, span);
    }
    if (is_keyword("let")) return let_expr();
    if (is_keyword("fun")) return lambda();
    if (is_keyword("if")) return if_expr();
    if (is_keyword("match")) return match_expr();
    return application();
  }

  SExprPtr let_expr() {
    const SourceSpan span = next().span;
    std::vector<Binding> bindings;
    bindings.push_back(binding());
    while (is_sym(";")) {
      next();
      if (is_keyword("in")) break;
      bindings.push_back(binding());
    }
    expect_keyword("in");
    SExprPtr body = expr();
    return make(sx::Let{std::move(bindings), std::move(body)}, span);
  }

  SExprPtr lambda() {
    const SourceSpan span = next().span;
    std::vector<Pattern> params;
    while (!is_sym("->")) {
      if (!starts_apat()) fail("expected a parameter pattern or '->'");
      params.push_back(apat());
    }
    if (params.empty()) fail("a function needs at least one parameter");
    next();
    SExprPtr body = expr();
    return make(sx::Lambda{Clause{std::move(params), std::move(body), span}}, span);
  }

  SExprPtr if_expr() {
    const SourceSpan span = next().span;
    SExprPtr c = expr();
    expect_keyword("then");
    SExprPtr t = expr();
    expect_keyword("else");
    SExprPtr e = expr();
    return make(sx::If{std::move(c), std::move(t), std::move(e)}, span);
  }

  SExprPtr match_expr() {
    const SourceSpan span = next().span;
    SExprPtr scrutinee = expr();
    expect_keyword("with");
    expect_sym("{");
    std::vector<Clause> clauses;
    while (!is_sym("}")) {
      const SourceSpan cspan = peek().span;
      Pattern p = pattern();
      expect_sym("->");
      SExprPtr body = expr();
      clauses.push_back(Clause{{std::move(p)}, std::move(body), cspan});
      if (is_sym(";")) {
        next();
      } else if (!is_sym("}")) {
        fail("expected ';' or '}' after a match clause");
      }
    }
    next();
    if (clauses.empty()) throw SyntaxError("match needs at least one clause", span);
    return make(sx::Match{std::move(scrutinee), std::move(clauses)}, span);
  }

  std::size_t ctor_arity(const Token& t) const {
    const auto arity = sig_.arity(t.text);
    if (!arity) throw SyntaxError("unknown constructor " + t.text, t.span);
    return *arity;
  }

  SExprPtr application() {
    if (peek().kind == Tok::Ctor) {
      const Token c = next();
      const std::size_t arity = ctor_arity(c);
      std::vector<SExprPtr> args;
      for (std::size_t i = 0; i < arity; ++i) {
        if (!starts_atom()) {
          throw SyntaxError("constructor " + c.text + " expects " + std::to_string(arity) + " argument(s), got " +
                                std::to_string(i),
                            c.span);
        }
        args.push_back(postfix());
      }
      SExprPtr e = make(sx::Constr{c.text, std::move(args)}, c.span);
      if (arity == 0) e = postfix_from(e);
      if (starts_atom()) {
        throw SyntaxError("constructor " + c.text + " expects " + std::to_string(arity) + " argument(s)", c.span);
      }
      return e;
    }
    SExprPtr e = postfix();
    while (starts_atom()) {
      const SourceSpan span = peek().span;
      e = make(sx::App{e, postfix()}, span);
    }
    return e;
  }

  SExprPtr postfix() { return postfix_from(atom()); }

  SExprPtr postfix_from(SExprPtr e) {
    while (is_sym(".")) {
      const SourceSpan span = next().span;
      e = make(sx::Proj{e, expect_ident("field name")}, span);
    }
    return e;
  }

  SExprPtr atom() {
    const Token t = next();
    switch (t.kind) {
      case Tok::Ident:
        if (t.text == "_") throw SyntaxError("'_' is only allowed in patterns", t.span);
        return make(sx::Var{t.text}, t.span);
      case Tok::Ctor: {
        const std::size_t arity = ctor_arity(t);
        if (arity != 0) {
          throw SyntaxError("constructor " + t.text + " expects " + std::to_string(arity) +
                                " argument(s); parenthesise the application",
                            t.span);
        }
        return make(sx::Constr{t.text, {}}, t.span);
      }
      case Tok::Int: return make(sx::Int{t.int_value}, t.span);
      case Tok::Float: return make(sx::Float{t.float_value}, t.span);
      case Tok::Str: return make(sx::Str{t.text}, t.span);
      case Tok::Sym: break;
      default: --pos_; fail("expected an expression");
    }
    if (t.text == "(") {
      if (peek().kind == Tok::Sym && is_sym(")", 1) && !operator_function(peek().text).empty()) {
        const Token op = next();
        next();
        return make(sx::Var{std::string(operator_function(op.text))}, op.span);
      }
      SExprPtr e = expr();
      if (is_sym(",")) {
        next();
        SExprPtr second = expr();
        expect_sym(")");
        return make(sx::Constr{"Pair", {std::move(e), std::move(second)}}, t.span);
      }
      expect_sym(")");
      return e;
    }
    if (t.text == "[") {
      std::vector<SExprPtr> items;
      if (!is_sym("]")) {
        items.push_back(expr());
        while (is_sym(",")) {
          next();
          items.push_back(expr());
        }
      }
      expect_sym("]");
      SExprPtr list = make(sx::Constr{"Nil", {}}, t.span);
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        list = make(sx::Constr{"Cons", {*it, list}}, (*it)->span);
      }
      return list;
    }
    if (t.text == "{") {
      std::vector<std::pair<std::string, SExprPtr>> fields;
      std::set<std::string> seen;
      if (!is_sym("}")) {
        while (true) {
          const SourceSpan fspan = peek().span;
          std::string name = expect_ident("field name");
          if (!seen.insert(name).second) throw SyntaxError("duplicate field " + name, fspan);
          expect_sym(":");
          fields.emplace_back(std::move(name), expr());
          if (!is_sym(",")) break;
          next();
        }
      }
      expect_sym("}");
      return make(sx::Record{std::move(fields)}, t.span);
    }
    --pos_;
    fail("expected an expression");
  }

  // --- patterns ----------------------------------------------------------

  Pattern pattern() {
    Pattern head = pattern_app();
    if (is_sym(":")) {
      const SourceSpan span = next().span;
      Pattern tail = pattern();
      Pattern cons;
      cons.kind = Pattern::Kind::Constr;
      cons.name = "Cons";
      cons.span = span;
      cons.args = {std::move(head), std::move(tail)};
      return cons;
    }
    return head;
  }

  Pattern pattern_app() {
    if (peek().kind == Tok::Ctor) {
      const Token c = next();
      const std::size_t arity = ctor_arity(c);
      Pattern p;
      p.kind = Pattern::Kind::Constr;
      p.name = c.text;
      p.span = c.span;
      for (std::size_t i = 0; i < arity; ++i) {
        if (!starts_apat()) {
          throw SyntaxError("constructor pattern " + c.text + " expects " + std::to_string(arity) + " argument(s)",
                            c.span);
        }
        p.args.push_back(apat());
      }
      return p;
    }
    return apat();
  }

  Pattern apat() {
    const Token t = next();
    Pattern p;
    p.span = t.span;
    switch (t.kind) {
      case Tok::Ident:
        p.kind = t.text == "_" ? Pattern::Kind::Wildcard : Pattern::Kind::Var;
        p.name = t.text;
        return p;
      case Tok::Ctor:
        if (ctor_arity(t) != 0) {
          throw SyntaxError("constructor pattern " + t.text + " needs arguments; parenthesise it", t.span);
        }
        p.kind = Pattern::Kind::Constr;
        p.name = t.text;
        return p;
      case Tok::Int:
        p.kind = Pattern::Kind::Int;
        p.int_value = t.int_value;
        return p;
      case Tok::Float:
        p.kind = Pattern::Kind::Float;
        p.float_value = t.float_value;
        return p;
      case Tok::Str:
        p.kind = Pattern::Kind::Str;
        p.name = t.text;
        return p;
      case Tok::Sym: break;
      default: --pos_; fail("expected a pattern");
    }
    if (t.text == "-") {
      const Token n = next();
      if (n.kind == Tok::Int) {
        p.kind = Pattern::Kind::Int;
        p.int_value = -n.int_value;
      } else {
        p.kind = Pattern::Kind::Float;
        p.float_value = -n.float_value;
      }
      return p;
    }
    if (t.text == "(") {
      Pattern first = pattern();
      if (is_sym(",")) {
        next();
        Pattern second = pattern();
        expect_sym(")");
        p.kind = Pattern::Kind::Constr;
        p.name = "Pair";
        p.args = {std::move(first), std::move(second)};
        return p;
      }
      expect_sym(")");
      return first;
    }
    if (t.text == "[") {
      std::vector<Pattern> items;
      if (!is_sym("]")) {
        items.push_back(pattern());
        while (is_sym(",")) {
          next();
          items.push_back(pattern());
        }
      }
      expect_sym("]");
      Pattern list;
      list.kind = Pattern::Kind::Constr;
      list.name = "Nil";
      list.span = t.span;
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        Pattern cons;
        cons.kind = Pattern::Kind::Constr;
        cons.name = "Cons";
        cons.span = it->span;
        cons.args = {std::move(*it), std::move(list)};
        list = std::move(cons);
      }
      return list;
    }
    if (t.text == "{") {
      p.kind = Pattern::Kind::Record;
      std::set<std::string> seen;
      if (!is_sym("}")) {
        while (true) {
          const SourceSpan fspan = peek().span;
          std::string name = expect_ident("field name");
          if (!seen.insert(name).second) throw SyntaxError("duplicate field " + name, fspan);
          Pattern sub;
          if (is_sym(":")) {
            next();
            sub = pattern();
          } else {
            sub.kind = Pattern::Kind::Var;
            sub.name = name;
            sub.span = fspan;
          }
          p.fields.push_back(std::move(name));
          p.args.push_back(std::move(sub));
          if (!is_sym(",")) break;
          next();
        }
      }
      expect_sym("}");
      return p;
    }
    --pos_;
    fail("expected a pattern");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const ConstructorSig& sig_;
};

}  // namespace

std::string_view operator_function(std::string_view op) {
  static const std::pair<std::string_view, std::string_view> kOps[] = {
      {"+", "plus"}, {"-", "minus"}, {"*", "times"}, {"/", "div"}, {"%", "mod"}, {"^", "pow"},
      {"==", "eq"},  {"<", "lt"},    {"<=", "leq"},  {">", "gt"},  {">=", "geq"}, {"&&", "and"},
      {"||", "or"},  {"++", "concat"},
  };
  for (const auto& [sym, name] : kOps) {
    if (sym == op) return name;
  }
  return {};
}

Program parse(std::string_view text, const ConstructorSig& sig) {
  Parser p(Lexer(text).run(), sig);
  return p.program();
}

std::vector<std::string> Program::datasets() const {
  std::vector<std::string> out;
  for (const auto& b : items) {
    if (b.kind == Binding::Kind::Data) out.push_back(b.name);
  }
  return out;
}

}  // namespace cognate::surface

#include "cognate/core.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_set>

namespace cognate {

std::string to_string(SourceSpan span) {
  if (!span.known()) return "?:?";
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace ast {

ExprPtr var(std::string name, SourceSpan span) { return std::make_shared<Expr>(expr::Var{std::move(name)}, span); }
ExprPtr integer(std::int64_t n, SourceSpan span) { return std::make_shared<Expr>(expr::Int{n}, span); }
ExprPtr floating(double r, SourceSpan span) { return std::make_shared<Expr>(expr::Float{r}, span); }
ExprPtr string(std::string s, SourceSpan span) { return std::make_shared<Expr>(expr::Str{std::move(s)}, span); }

ExprPtr let(std::string name, ExprPtr bound, ExprPtr body, SourceSpan span) {
  return std::make_shared<Expr>(expr::Let{std::move(name), std::move(bound), std::move(body)}, span);
}

ExprPtr record(std::vector<std::pair<std::string, ExprPtr>> fields, SourceSpan span) {
  std::stable_sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return std::make_shared<Expr>(expr::Record{std::move(fields)}, span);
}

ExprPtr project(ExprPtr record, std::string field, SourceSpan span) {
  return std::make_shared<Expr>(expr::Project{std::move(record), std::move(field)}, span);
}

ExprPtr constr(std::string name, std::vector<ExprPtr> args, SourceSpan span) {
  return std::make_shared<Expr>(expr::Constr{std::move(name), std::move(args)}, span);
}

ExprPtr app(ExprPtr fn, ExprPtr arg, SourceSpan span) {
  return std::make_shared<Expr>(expr::App{std::move(fn), std::move(arg)}, span);
}

ExprPtr foreign(std::string name, std::vector<ExprPtr> args, SourceSpan span) {
  return std::make_shared<Expr>(expr::Foreign{std::move(name), std::move(args)}, span);
}

ExprPtr fun(ElimPtr elim, SourceSpan span) { return std::make_shared<Expr>(expr::Fun{std::move(elim)}, span); }

ExprPtr letrec(RecDefsPtr defs, ExprPtr body, SourceSpan span) {
  return std::make_shared<Expr>(expr::LetRec{std::move(defs), std::move(body)}, span);
}

ElimPtr elim_var(std::string name, Continuation next) {
  return std::make_shared<Eliminator>(elim::Var{std::move(name), std::move(next)});
}

ElimPtr elim_record(std::vector<std::string> fields, Continuation next) {
  return std::make_shared<Eliminator>(elim::Record{std::move(fields), std::move(next)});
}

ElimPtr elim_constr(std::map<std::string, Continuation> branches) {
  return std::make_shared<Eliminator>(elim::Constr{std::move(branches)});
}

}  // namespace ast

// ---------------------------------------------------------------------------

Value::Value(IntVal v, Address a) : node_(std::make_shared<Node>(Node{v, a})) {}
Value::Value(FloatVal v, Address a) : node_(std::make_shared<Node>(Node{v, a})) {}
Value::Value(StrVal v, Address a) : node_(std::make_shared<Node>(Node{std::move(v), a})) {}
Value::Value(RecordVal v, Address a) : node_(std::make_shared<Node>(Node{std::move(v), a})) {}
Value::Value(ConstrVal v, Address a) : node_(std::make_shared<Node>(Node{std::move(v), a})) {}
Value::Value(ClosureVal v, Address a) : node_(std::make_shared<Node>(Node{std::move(v), a})) {}

const Value* RecordVal::find(std::string_view name) const {
  auto it = std::lower_bound(fields.begin(), fields.end(), name,
                             [](const auto& field, std::string_view n) { return field.first < n; });
  if (it == fields.end() || it->first != name) return nullptr;
  return &it->second;
}

Env Env::extend(std::string name, Value v) const {
  return Env(std::make_shared<const Node>(Node{std::move(name), std::move(v), head_}));
}

Env Env::concat(const Env& later) const {
  Env out = *this;
  for (auto& [name, value] : later.bindings()) out = out.extend(name, value);
  return out;
}

const Value* Env::lookup(std::string_view name) const {
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get()) {
    if (n->name == name) return &n->value;
  }
  return nullptr;
}

std::vector<std::pair<std::string, Value>> Env::bindings() const {
  std::vector<std::pair<std::string, Value>> out;
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get()) out.emplace_back(n->name, n->value);
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

ConstructorSig ConstructorSig::standard() {
  ConstructorSig sig;
  sig.add("Nil", 0, "List");
  sig.add("Cons", 2, "List");
  sig.add("True", 0, "Bool");
  sig.add("False", 0, "Bool");
  sig.add("Pair", 2, "Pair");
  sig.add("None", 0, "Option");
  sig.add("Some", 1, "Option");
  sig.add("LineChart", 1, "View");
  sig.add("BarChart", 1, "View");
  sig.add("ScatterPlot", 1, "View");
  return sig;
}

void ConstructorSig::add(std::string name, std::size_t arity, std::string datatype) {
  ctors_[std::move(name)] = ConstructorInfo{arity, std::move(datatype)};
}

std::optional<std::size_t> ConstructorSig::arity(std::string_view name) const {
  if (const auto* info = find(name)) return info->arity;
  return std::nullopt;
}

const ConstructorInfo* ConstructorSig::find(std::string_view name) const {
  auto it = ctors_.find(name);
  return it == ctors_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> ForeignSig::arity(std::string_view name) const {
  auto it = arities_.find(name);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

std::string to_string(const Diagnostic& d) {
  std::string out = d.severity == Severity::Error ? "error" : "warning";
  if (d.span.known()) out += " at " + to_string(d.span);
  return out + ": " + d.message;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Validator {
 public:
  Validator(const ConstructorSig& sig, const ForeignSig& fsig) : sig_(sig), fsig_(fsig) {}

  void expr(const Expr& e) {
    std::visit(overloaded{
                   [](const expr::Var&) {},
                   [](const expr::Int&) {},
                   [](const expr::Float&) {},
                   [](const expr::Str&) {},
                   [&](const expr::Let& x) {
                     expr(*x.bound);
                     expr(*x.body);
                   },
                   [&](const expr::Record& x) {
                     for (const auto& [_, f] : x.fields) expr(*f);
                   },
                   [&](const expr::Project& x) { expr(*x.record); },
                   [&](const expr::Constr& x) {
                     const auto arity = sig_.arity(x.name);
                     if (!arity) {
                       report(e.span, "unknown constructor " + x.name);
                     } else if (*arity != x.args.size()) {
                       report(e.span, "constructor " + x.name + " expects " + std::to_string(*arity) +
                                          " argument(s), got " + std::to_string(x.args.size()));
                     }
                     for (const auto& a : x.args) expr(*a);
                   },
                   [&](const expr::App& x) {
                     expr(*x.fn);
                     expr(*x.arg);
                   },
                   [&](const expr::Foreign& x) {
                     const auto arity = fsig_.arity(x.name);
                     if (!arity) {
                       report(e.span, "unknown foreign function " + x.name);
                     } else if (*arity != x.args.size()) {
                       report(e.span, "foreign function " + x.name + " expects " + std::to_string(*arity) +
                                          " argument(s), got " + std::to_string(x.args.size()));
                     }
                     for (const auto& a : x.args) expr(*a);
                   },
                   [&](const expr::Fun& x) { function(*x.elim, e.span); },
                   [&](const expr::LetRec& x) {
                     std::set<std::string> seen;
                     for (const auto& [name, s] : x.defs->defs) {
                       if (!seen.insert(name).second) report(e.span, "duplicate recursive definition " + name);
                       function(*s, e.span);
                     }
                     expr(*x.body);
                   },
               },
               e.node);
  }

  std::vector<Diagnostic> take() { return std::move(diags_); }

 private:
  void report(SourceSpan span, std::string message) { diags_.push_back({Severity::Error, std::move(message), span}); }

  void function(const Eliminator& s, SourceSpan span) {
    const auto d = demand(s, span);
    if (d && *d != 1) {
      report(span, "function eliminator must match exactly one argument, but consumes " + std::to_string(*d));
    }
  }

  // Number of stack entries a continuation pops before reaching a term.
  std::optional<long> demand(const Continuation& k, SourceSpan span) {
    if (k.is_term()) {
      expr(*k.term());
      return 0;
    }
    return demand(*k.elim(), span);
  }

  std::optional<long> demand(const Eliminator& s, SourceSpan span) {
    return std::visit(
        overloaded{
            [&](const elim::Var& x) -> std::optional<long> {
              const auto d = demand(x.next, span);
              return d ? std::optional<long>(1 + *d) : std::nullopt;
            },
            [&](const elim::Record& x) -> std::optional<long> {
              const auto d = demand(x.next, span);
              if (!d) return std::nullopt;
              const long n = static_cast<long>(x.fields.size());
              if (*d < n) {
                report(span, "record eliminator continuation matches fewer than its " + std::to_string(n) + " field(s)");
                return std::nullopt;
              }
              return 1 + *d - n;
            },
            [&](const elim::Constr& x) -> std::optional<long> {
              std::optional<long> result;
              bool consistent = true;
              for (const auto& [c, k] : x.branches) {
                const auto arity = sig_.arity(c);
                const auto d = demand(k, span);
                if (!arity) {
                  report(span, "unknown constructor " + c + " in eliminator");
                  consistent = false;
                  continue;
                }
                if (!d) {
                  consistent = false;
                  continue;
                }
                const long a = static_cast<long>(*arity);
                if (*d < a) {
                  report(span, "branch " + c + " matches fewer than its " + std::to_string(a) + " argument(s)");
                  consistent = false;
                  continue;
                }
                const long r = 1 + *d - a;
                if (result && *result != r) {
                  report(span, "eliminator branches disagree on match depth at " + c);
                  consistent = false;
                }
                if (!result) result = r;
              }
              if (!consistent) return std::nullopt;
              return result.value_or(1);
            },
        },
        s.node);
  }

  const ConstructorSig& sig_;
  const ForeignSig& fsig_;
  std::vector<Diagnostic> diags_;
};

void lint_expr(const Expr& e, const ConstructorSig& sig, std::vector<Diagnostic>& out);

void lint_cont(const Continuation& k, SourceSpan span, const ConstructorSig& sig, std::vector<Diagnostic>& out) {
  if (k.is_term()) {
    lint_expr(*k.term(), sig, out);
    return;
  }
  std::visit(overloaded{
                 [&](const elim::Var& x) { lint_cont(x.next, span, sig, out); },
                 [&](const elim::Record& x) { lint_cont(x.next, span, sig, out); },
                 [&](const elim::Constr& x) {
                   std::set<std::string> types;
                   for (const auto& [c, next] : x.branches) {
                     if (const auto* info = sig.find(c)) types.insert(info->datatype);
                     lint_cont(next, span, sig, out);
                   }
                   if (types.size() > 1) {
                     std::string names;
                     for (const auto& t : types) names += (names.empty() ? "" : ", ") + t;
                     out.push_back({Severity::Warning, "eliminator mixes constructors of types " + names, span});
                   }
                 },
             },
             k.elim()->node);
}

void lint_expr(const Expr& e, const ConstructorSig& sig, std::vector<Diagnostic>& out) {
  std::visit(overloaded{
                 [](const auto&) {},
                 [&](const expr::Let& x) {
                   lint_expr(*x.bound, sig, out);
                   lint_expr(*x.body, sig, out);
                 },
                 [&](const expr::Record& x) {
                   for (const auto& [_, f] : x.fields) lint_expr(*f, sig, out);
                 },
                 [&](const expr::Project& x) { lint_expr(*x.record, sig, out); },
                 [&](const expr::Constr& x) {
                   for (const auto& a : x.args) lint_expr(*a, sig, out);
                 },
                 [&](const expr::App& x) {
                   lint_expr(*x.fn, sig, out);
                   lint_expr(*x.arg, sig, out);
                 },
                 [&](const expr::Foreign& x) {
                   for (const auto& a : x.args) lint_expr(*a, sig, out);
                 },
                 [&](const expr::Fun& x) { lint_cont(ast::cont(x.elim), e.span, sig, out); },
                 [&](const expr::LetRec& x) {
                   for (const auto& [_, s] : x.defs->defs) lint_cont(ast::cont(s), e.span, sig, out);
                   lint_expr(*x.body, sig, out);
                 },
             },
             e.node);
}

}  // namespace

std::vector<Diagnostic> validate(const Expr& e, const ConstructorSig& sig, const ForeignSig& fsig) {
  Validator v(sig, fsig);
  v.expr(e);
  return v.take();
}

std::vector<Diagnostic> lint(const Expr& e, const ConstructorSig& sig) {
  std::vector<Diagnostic> out;
  lint_expr(e, sig, out);
  return out;
}

// ---------------------------------------------------------------------------

PlainTerm PlainTerm::integer(std::int64_t n) {
  PlainTerm t;
  t.kind = Kind::Int;
  t.int_value = n;
  return t;
}

PlainTerm PlainTerm::floating(double r) {
  PlainTerm t;
  t.kind = Kind::Float;
  t.float_value = r;
  return t;
}

PlainTerm PlainTerm::string(std::string s) {
  PlainTerm t;
  t.kind = Kind::Str;
  t.text = std::move(s);
  return t;
}

PlainTerm PlainTerm::constr(std::string name, std::vector<PlainTerm> args) {
  PlainTerm t;
  t.kind = Kind::Constr;
  t.text = std::move(name);
  t.children = std::move(args);
  return t;
}

PlainTerm PlainTerm::record(std::vector<std::pair<std::string, PlainTerm>> fields) {
  std::stable_sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PlainTerm t;
  t.kind = Kind::Record;
  for (auto& [name, value] : fields) {
    t.names.push_back(std::move(name));
    t.children.push_back(std::move(value));
  }
  return t;
}

PlainTerm PlainTerm::closure() {
  PlainTerm t;
  t.kind = Kind::Closure;
  return t;
}

PlainTerm erase(const Value& v) {
  return std::visit(overloaded{
                        [](const IntVal& x) { return PlainTerm::integer(x.value); },
                        [](const FloatVal& x) { return PlainTerm::floating(x.value); },
                        [](const StrVal& x) { return PlainTerm::string(x.value); },
                        [](const RecordVal& x) {
                          std::vector<std::pair<std::string, PlainTerm>> fields;
                          for (const auto& [name, value] : x.fields) fields.emplace_back(name, erase(value));
                          return PlainTerm::record(std::move(fields));
                        },
                        [](const ConstrVal& x) {
                          std::vector<PlainTerm> args;
                          for (const auto& a : x.args) args.push_back(erase(a));
                          return PlainTerm::constr(x.name, std::move(args));
                        },
                        [](const ClosureVal&) { return PlainTerm::closure(); },
                    },
                    v.raw());
}

namespace {
void collect_addresses(const Value& v, VertexSet& out, std::unordered_set<const void*>& seen) {
  if (!seen.insert(v.identity()).second) return;
  out.insert(v.addr());
  std::visit(overloaded{
                 [](const auto&) {},
                 [&](const RecordVal& x) {
                   for (const auto& [_, f] : x.fields) collect_addresses(f, out, seen);
                 },
                 [&](const ConstrVal& x) {
                   for (const auto& a : x.args) collect_addresses(a, out, seen);
                 },
                 [&](const ClosureVal& x) {
                   for (const auto& [_, b] : x.env.bindings()) collect_addresses(b, out, seen);
                 },
             },
             v.raw());
}
}  // namespace

VertexSet addresses_of(const Value& v) {
  VertexSet out;
  std::unordered_set<const void*> seen;
  collect_addresses(v, out, seen);
  return out;
}

// ---------------------------------------------------------------------------

std::string format_float(double r) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {

void debug_expr(const Expr& e, std::ostream& os);

void debug_cont(const Continuation& k, std::ostream& os);

void debug_elim(const Eliminator& s, std::ostream& os) {
  std::visit(overloaded{
                 [&](const elim::Var& x) {
                   os << "(elim-var " << x.name << ' ';
                   debug_cont(x.next, os);
                   os << ')';
                 },
                 [&](const elim::Record& x) {
                   os << "(elim-rec (";
                   for (std::size_t i = 0; i < x.fields.size(); ++i) os << (i ? " " : "") << x.fields[i];
                   os << ") ";
                   debug_cont(x.next, os);
                   os << ')';
                 },
                 [&](const elim::Constr& x) {
                   os << "(elim-con";
                   for (const auto& [c, k] : x.branches) {
                     os << " (" << c << ' ';
                     debug_cont(k, os);
                     os << ')';
                   }
                   os << ')';
                 },
             },
             s.node);
}

void debug_cont(const Continuation& k, std::ostream& os) {
  if (k.is_term()) {
    debug_expr(*k.term(), os);
  } else {
    debug_elim(*k.elim(), os);
  }
}

void debug_expr(const Expr& e, std::ostream& os) {
  std::visit(overloaded{
                 [&](const expr::Var& x) { os << x.name; },
                 [&](const expr::Int& x) { os << x.value; },
                 [&](const expr::Float& x) { os << format_float(x.value); },
                 [&](const expr::Str& x) { os << quote_string(x.value); },
                 [&](const expr::Let& x) {
                   os << "(let " << x.name << ' ';
                   debug_expr(*x.bound, os);
                   os << ' ';
                   debug_expr(*x.body, os);
                   os << ')';
                 },
                 [&](const expr::Record& x) {
                   os << "(record";
                   for (const auto& [name, f] : x.fields) {
                     os << " (" << name << ' ';
                     debug_expr(*f, os);
                     os << ')';
                   }
                   os << ')';
                 },
                 [&](const expr::Project& x) {
                   os << "(proj ";
                   debug_expr(*x.record, os);
                   os << ' ' << x.field << ')';
                 },
                 [&](const expr::Constr& x) {
                   os << "(con " << x.name;
                   for (const auto& a : x.args) {
                     os << ' ';
                     debug_expr(*a, os);
                   }
                   os << ')';
                 },
                 [&](const expr::App& x) {
                   os << "(app ";
                   debug_expr(*x.fn, os);
                   os << ' ';
                   debug_expr(*x.arg, os);
                   os << ')';
                 },
                 [&](const expr::Foreign& x) {
                   os << "(foreign " << x.name;
                   for (const auto& a : x.args) {
                     os << ' ';
                     debug_expr(*a, os);
                   }
                   os << ')';
                 },
                 [&](const expr::Fun& x) {
                   os << "(fun ";
                   debug_elim(*x.elim, os);
                   os << ')';
                 },
                 [&](const expr::LetRec& x) {
                   os << "(letrec (";
                   bool first = true;
                   for (const auto& [name, s] : x.defs->defs) {
                     os << (first ? "" : " ") << '(' << name << ' ';
                     debug_elim(*s, os);
                     os << ')';
                     first = false;
                   }
                   os << ") ";
                   debug_expr(*x.body, os);
                   os << ')';
                 },
             },
             e.node);
}

bool is_list(const PlainTerm& t) {
  const PlainTerm* cur = &t;
  while (cur->kind == PlainTerm::Kind::Constr && cur->text == "Cons" && cur->children.size() == 2) {
    cur = &cur->children[1];
  }
  return cur->kind == PlainTerm::Kind::Constr && cur->text == "Nil" && cur->children.empty();
}

void plain_to(const PlainTerm& t, std::ostream& os) {
  switch (t.kind) {
    case PlainTerm::Kind::Int: os << t.int_value; break;
    case PlainTerm::Kind::Float: os << format_float(t.float_value); break;
    case PlainTerm::Kind::Str: os << quote_string(t.text); break;
    case PlainTerm::Kind::Closure: os << "<fun>"; break;
    case PlainTerm::Kind::Record:
      os << '{';
      for (std::size_t i = 0; i < t.names.size(); ++i) {
        os << (i ? ", " : "") << t.names[i] << ": ";
        plain_to(t.children[i], os);
      }
      os << '}';
      break;
    case PlainTerm::Kind::Constr:
      if (t.text == "Cons" && is_list(t)) {
        os << '[';
        bool first = true;
        for (const PlainTerm* cur = &t; cur->text == "Cons"; cur = &cur->children[1]) {
          if (!first) os << ", ";
          first = false;
          plain_to(cur->children[0], os);
        }
        os << ']';
      } else if (t.text == "Nil" && t.children.empty()) {
        os << "[]";
      } else {
        os << t.text;
        if (!t.children.empty()) {
          os << '(';
          for (std::size_t i = 0; i < t.children.size(); ++i) {
            if (i) os << ", ";
            plain_to(t.children[i], os);
          }
          os << ')';
        }
      }
      break;
  }
}

}  // namespace

std::string to_debug(const Expr& e) {
  std::ostringstream os;
  debug_expr(e, os);
  return os.str();
}

std::string to_debug(const Eliminator& s) {
  std::ostringstream os;
  debug_elim(s, os);
  return os.str();
}

std::string to_debug(const Continuation& k) {
  std::ostringstream os;
  debug_cont(k, os);
  return os.str();
}

std::string to_string(const PlainTerm& t) {
  std::ostringstream os;
  plain_to(t, os);
  return os.str();
}

}  // namespace cognate

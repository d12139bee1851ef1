#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cognate/graph.hpp"

namespace cognate {

struct SourceSpan {
  int line = 0;
  int column = 0;
  bool known() const noexcept { return line > 0; }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

std::string to_string(SourceSpan span);

class Expr;
class Eliminator;
using ExprPtr = std::shared_ptr<const Expr>;
using ElimPtr = std::shared_ptr<const Eliminator>;

// Either a term (matching is complete) or a further eliminator.
struct Continuation {
  std::variant<ExprPtr, ElimPtr> node;

  bool is_term() const noexcept { return std::holds_alternative<ExprPtr>(node); }
  const ExprPtr& term() const { return std::get<ExprPtr>(node); }
  const ElimPtr& elim() const { return std::get<ElimPtr>(node); }
};

// Mutually recursive block; declaration order fixes allocation order in close_defs.
struct RecDefs {
  std::vector<std::pair<std::string, ElimPtr>> defs;
};
using RecDefsPtr = std::shared_ptr<const RecDefs>;

namespace expr {
struct Var {
  std::string name;
};
struct Int {
  std::int64_t value;
};
struct Float {
  double value;
};
struct Str {
  std::string value;
};
struct Let {
  std::string name;
  ExprPtr bound;
  ExprPtr body;
};
// Fields are kept sorted by name.
struct Record {
  std::vector<std::pair<std::string, ExprPtr>> fields;
};
struct Project {
  ExprPtr record;
  std::string field;
};
struct Constr {
  std::string name;
  std::vector<ExprPtr> args;
};
struct App {
  ExprPtr fn;
  ExprPtr arg;
};
struct Foreign {
  std::string name;
  std::vector<ExprPtr> args;
};
struct Fun {
  ElimPtr elim;
};
struct LetRec {
  RecDefsPtr defs;
  ExprPtr body;
};
}  // namespace expr

class Expr {
 public:
  using Node = std::variant<expr::Var, expr::Int, expr::Float, expr::Str, expr::Let, expr::Record, expr::Project,
                            expr::Constr, expr::App, expr::Foreign, expr::Fun, expr::LetRec>;

  Expr(Node node, SourceSpan span) : node(std::move(node)), span(span) {}

  Node node;
  SourceSpan span;
};

namespace elim {
struct Var {
  std::string name;
  Continuation next;
};
struct Record {
  std::vector<std::string> fields;
  Continuation next;
};
struct Constr {
  std::map<std::string, Continuation> branches;
};
}  // namespace elim

class Eliminator {
 public:
  using Node = std::variant<elim::Var, elim::Record, elim::Constr>;
  explicit Eliminator(Node node) : node(std::move(node)) {}
  Node node;
};

// Construction helpers.
namespace ast {
ExprPtr var(std::string name, SourceSpan span = {});
ExprPtr integer(std::int64_t n, SourceSpan span = {});
ExprPtr floating(double r, SourceSpan span = {});
ExprPtr string(std::string s, SourceSpan span = {});
ExprPtr let(std::string name, ExprPtr bound, ExprPtr body, SourceSpan span = {});
ExprPtr record(std::vector<std::pair<std::string, ExprPtr>> fields, SourceSpan span = {});
ExprPtr project(ExprPtr record, std::string field, SourceSpan span = {});
ExprPtr constr(std::string name, std::vector<ExprPtr> args = {}, SourceSpan span = {});
ExprPtr app(ExprPtr fn, ExprPtr arg, SourceSpan span = {});
ExprPtr foreign(std::string name, std::vector<ExprPtr> args, SourceSpan span = {});
ExprPtr fun(ElimPtr elim, SourceSpan span = {});
ExprPtr letrec(RecDefsPtr defs, ExprPtr body, SourceSpan span = {});

ElimPtr elim_var(std::string name, Continuation next);
ElimPtr elim_record(std::vector<std::string> fields, Continuation next);
ElimPtr elim_constr(std::map<std::string, Continuation> branches);

inline Continuation term(ExprPtr e) { return Continuation{std::move(e)}; }
inline Continuation cont(ElimPtr s) { return Continuation{std::move(s)}; }
}  // namespace ast

// ---------------------------------------------------------------------------
// Values

class Env;
struct IntVal;
struct FloatVal;
struct StrVal;
struct RecordVal;
struct ConstrVal;
struct ClosureVal;

class Value {
 public:
  struct Node;

  Value() = default;
  Value(IntVal v, Address a);
  Value(FloatVal v, Address a);
  Value(StrVal v, Address a);
  Value(RecordVal v, Address a);
  Value(ConstrVal v, Address a);
  Value(ClosureVal v, Address a);

  bool valid() const noexcept { return node_ != nullptr; }
  Address addr() const noexcept;
  const auto& raw() const noexcept;

  template <class T>
  const T* get_if() const noexcept;

  // Identity of the underlying node, for memoised traversals.
  const void* identity() const noexcept { return node_.get(); }

 private:
  std::shared_ptr<const Node> node_;
};

struct IntVal {
  std::int64_t value;
};
struct FloatVal {
  double value;
};
struct StrVal {
  std::string value;
};
struct RecordVal {
  std::vector<std::pair<std::string, Value>> fields;  // sorted by name
  const Value* find(std::string_view name) const;
};
struct ConstrVal {
  std::string name;
  std::vector<Value> args;
};

// Environments are persistent singly-linked lists; extension never copies.
class Env {
 public:
  Env() = default;

  Env extend(std::string name, Value v) const;
  // this · later: bindings of `later` shadow those of *this.
  Env concat(const Env& later) const;
  const Value* lookup(std::string_view name) const;
  bool empty() const noexcept { return head_ == nullptr; }
  // Oldest binding first.
  std::vector<std::pair<std::string, Value>> bindings() const;

 private:
  struct Node;
  explicit Env(std::shared_ptr<const Node> head) : head_(std::move(head)) {}
  std::shared_ptr<const Node> head_;
};

struct ClosureVal {
  Env env;
  RecDefsPtr defs;
  ElimPtr elim;
};

using RawValue = std::variant<IntVal, FloatVal, StrVal, RecordVal, ConstrVal, ClosureVal>;

struct Value::Node {
  RawValue raw;
  Address addr;
};

inline const auto& Value::raw() const noexcept { return node_->raw; }
inline Address Value::addr() const noexcept { return node_->addr; }

template <class T>
const T* Value::get_if() const noexcept {
  return std::get_if<T>(&node_->raw);
}

struct Env::Node {
  std::string name;
  Value value;
  std::shared_ptr<const Node> next;
};

// ---------------------------------------------------------------------------
// Signatures

struct ConstructorInfo {
  std::size_t arity = 0;
  std::string datatype;
};

class ConstructorSig {
 public:
  // Nil/Cons, True/False, Pair, None/Some and the chart constructors.
  static ConstructorSig standard();

  void add(std::string name, std::size_t arity, std::string datatype);
  std::optional<std::size_t> arity(std::string_view name) const;
  const ConstructorInfo* find(std::string_view name) const;
  const std::map<std::string, ConstructorInfo, std::less<>>& all() const noexcept { return ctors_; }

 private:
  std::map<std::string, ConstructorInfo, std::less<>> ctors_;
};

class ForeignSig {
 public:
  void add(std::string name, std::size_t arity) { arities_[std::move(name)] = arity; }
  std::optional<std::size_t> arity(std::string_view name) const;
  const std::map<std::string, std::size_t, std::less<>>& all() const noexcept { return arities_; }

 private:
  std::map<std::string, std::size_t, std::less<>> arities_;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

std::string to_string(const Diagnostic& d);

// Saturation and eliminator-depth checks. Returns errors only.
std::vector<Diagnostic> validate(const Expr& e, const ConstructorSig& sig, const ForeignSig& fsig);
// Constructor eliminators whose branches span several data types.
std::vector<Diagnostic> lint(const Expr& e, const ConstructorSig& sig);

// ---------------------------------------------------------------------------
// Address-erased values

struct PlainTerm {
  enum class Kind { Int, Float, Str, Record, Constr, Closure };

  Kind kind = Kind::Int;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  std::string text;                 // string payload or constructor name
  std::vector<std::string> names;   // record field names
  std::vector<PlainTerm> children;  // record field values or constructor arguments

  static PlainTerm integer(std::int64_t n);
  static PlainTerm floating(double r);
  static PlainTerm string(std::string s);
  static PlainTerm constr(std::string name, std::vector<PlainTerm> args = {});
  static PlainTerm record(std::vector<std::pair<std::string, PlainTerm>> fields);
  static PlainTerm closure();

  friend bool operator==(const PlainTerm&, const PlainTerm&) = default;
};

PlainTerm erase(const Value& v);
VertexSet addresses_of(const Value& v);

// Shortest round-trip decimal form; always contains '.', 'e', "inf" or "nan".
std::string format_float(double r);
std::string quote_string(std::string_view s);

// Canonical debug forms, stable across runs.
std::string to_debug(const Expr& e);
std::string to_debug(const Eliminator& s);
std::string to_debug(const Continuation& k);
std::string to_string(const PlainTerm& t);

}  // namespace cognate

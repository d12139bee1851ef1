#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cognate/core.hpp"

namespace cognate::surface {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, SourceSpan span)
      : std::runtime_error(to_string(span) + ": " + message), message_(message), span_(span) {}
  const std::string& message() const noexcept { return message_; }
  SourceSpan span() const noexcept { return span_; }

 private:
  std::string message_;
  SourceSpan span_;
};

// Raised by desugaring when clause checks or scoping fail.
class DesugarError : public std::runtime_error {
 public:
  explicit DesugarError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct Pattern {
  enum class Kind { Var, Wildcard, Constr, Record, Int, Float, Str };

  Kind kind = Kind::Wildcard;
  std::string name;                 // variable or constructor name, string literal text
  std::vector<Pattern> args;        // constructor arguments or record field patterns
  std::vector<std::string> fields;  // record field names, parallel to args
  std::int64_t int_value = 0;
  double float_value = 0.0;
  SourceSpan span;
};

struct SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;

struct Clause {
  std::vector<Pattern> params;
  SExprPtr body;
  SourceSpan span;
};

struct Definition {
  std::string name;
  std::vector<Clause> clauses;
  SourceSpan span;
};

// A binding in a let block or at top level.
struct Binding {
  enum class Kind { Function, Value, Data };
  Kind kind = Kind::Value;
  Definition def;  // Function
  Pattern pattern;  // Value
  SExprPtr value;   // Value
  std::string name;  // Data
  SourceSpan span;
};

namespace sx {
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
  std::vector<Binding> bindings;
  SExprPtr body;
};
struct Lambda {
  Clause clause;
};
struct If {
  SExprPtr cond, then_branch, else_branch;
};
struct Match {
  SExprPtr scrutinee;
  std::vector<Clause> clauses;
};
struct BinOp {
  std::string op;
  SExprPtr lhs, rhs;
};
struct Neg {
  SExprPtr operand;
};
struct App {
  SExprPtr fn, arg;
};
struct Proj {
  SExprPtr record;
  std::string field;
};
struct Constr {
  std::string name;
  std::vector<SExprPtr> args;
};
struct Record {
  std::vector<std::pair<std::string, SExprPtr>> fields;
};
}  // namespace sx

struct SExpr {
  using Node = std::variant<sx::Var, sx::Int, sx::Float, sx::Str, sx::Let, sx::Lambda, sx::If, sx::Match, sx::BinOp,
                            sx::Neg, sx::App, sx::Proj, sx::Constr, sx::Record>;
  SExpr(Node node, SourceSpan span) : node(std::move(node)), span(span) {}
  Node node;
  SourceSpan span;
};

struct Program {
  std::vector<Binding> items;
  SExprPtr main;

  std::vector<std::string> datasets() const;
};

// Throws SyntaxError with the offending line and column.
Program parse(std::string_view text, const ConstructorSig& sig = ConstructorSig::standard());

// Empty when the clauses merge into one eliminator.
std::vector<Diagnostic> check_clauses(const Definition& def, const ConstructorSig& sig = ConstructorSig::standard());

// Throws DesugarError.
ExprPtr desugar(const Program& program, const ConstructorSig& sig = ConstructorSig::standard());

// Library functions (map, filter, foldl, ...) available to every program.
const Program& library();

struct CompileOptions {
  bool with_library = true;
  const ConstructorSig* sig = nullptr;  // standard when null
  const ForeignSig* foreign = nullptr;  // standard registry when null
};

// parse, prepend the library definitions the program uses, desugar, validate.
// Throws SyntaxError or DesugarError.
ExprPtr compile(std::string_view text, const CompileOptions& options = {});

// Operator symbol to foreign-function name, or empty.
std::string_view operator_function(std::string_view op);

}  // namespace cognate::surface

#pragma once

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cognate/core.hpp"
#include "cognate/graph.hpp"

namespace cognate {

enum class EvalErrorKind {
  UnboundVariable,
  MissingField,
  NotARecord,
  NotAClosure,
  MatchFailure,
  Foreign,
  UnknownForeign,
  Arity,
  DepthExceeded,
};

std::string_view to_string(EvalErrorKind kind);

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what, SourceSpan span = {})
      : std::runtime_error(what), kind_(kind), span_(span) {}
  EvalErrorKind kind() const noexcept { return kind_; }
  SourceSpan span() const noexcept { return span_; }

 private:
  EvalErrorKind kind_;
  SourceSpan span_;
};

enum class VertexKind { Int, Float, Str, Record, Constr, Closure };

// What was allocated at a vertex, kept for labelling and presentation filters.
struct VertexInfo {
  VertexKind kind = VertexKind::Int;
  std::string label;
  double number = 0.0;  // valid for Int and Float

  bool numeric() const noexcept { return kind == VertexKind::Int || kind == VertexKind::Float; }
};

// Allocation site shared by the evaluator, close_defs, foreign functions and
// dataset loading. Each allocation adds in_star(deps, fresh).
class Heap {
 public:
  explicit Heap(std::uint32_t start = 0) : allocator_(start) {}

  Value allocate(RawValue raw, std::span<const Address> deps);
  Value allocate(RawValue raw, const VertexSet& deps);
  // Two-phase allocation so that a parent can take its address before its children.
  Address reserve() noexcept { return allocator_.fresh(); }
  Value place(Address a, RawValue raw, std::span<const Address> deps);

  const GraphBuilder& graph() const noexcept { return builder_; }
  std::uint32_t next_address() const noexcept { return allocator_.peek(); }
  const std::vector<VertexInfo>& info() const noexcept { return info_; }

  DepGraph snapshot() const { return builder_.snapshot(); }
  DepGraph freeze() && { return std::move(builder_).freeze(); }
  std::vector<VertexInfo> take_info() && { return std::move(info_); }

 private:
  GraphBuilder builder_;
  AddressAllocator allocator_;
  std::vector<VertexInfo> info_;
};

VertexInfo describe(const RawValue& raw);

struct ForeignImpl {
  std::string name;
  std::size_t arity = 0;
  std::function<Value(std::span<const Value>, Heap&, SourceSpan)> apply;
};

class ForeignRegistry {
 public:
  // plus minus times div mod pow eq lt leq gt geq and or not concat intToFloat.
  static const ForeignRegistry& standard();

  void add(ForeignImpl impl);
  const ForeignImpl* find(std::string_view name) const;
  ForeignSig signature() const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ForeignImpl, std::less<>> impls_;
};

// A demand set V. Kept as a sorted, duplicate-free address list because it is
// small and rebuilt at every application.
using Demand = std::vector<Address>;

// Result of matching a value stack against a continuation.
struct MatchResult {
  Env env;
  ExprPtr branch;
  Demand consumed;  // in matching order
};

// stack[0] is matched first.
MatchResult match(std::vector<Value> stack, const Continuation& k, SourceSpan span = {});

struct EvalLimits {
  std::size_t max_depth = 10000;
};

class Evaluator {
 public:
  Evaluator(Heap& heap, const ForeignRegistry& foreign, EvalLimits limits = {})
      : heap_(heap), foreign_(foreign), limits_(limits) {}

  Value eval(const Env& env, const Expr& e, const Demand& demand);
  std::vector<Value> eval_seq(const Env& env, std::span<const ExprPtr> es, const Demand& demand);
  Env close_defs(const Env& env, const RecDefsPtr& defs, const Demand& demand);
  Value apply_foreign(std::string_view name, std::span<const Value> args, SourceSpan span);

 private:
  Heap& heap_;
  const ForeignRegistry& foreign_;
  EvalLimits limits_;
  std::size_t depth_ = 0;
};

// fun x1 -> ... fun xn -> f(x1, ..., xn), with no captured environment.
ElimPtr foreign_wrapper(const std::string& name, std::size_t arity);

}  // namespace cognate

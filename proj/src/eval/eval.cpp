#include "cognate/eval.hpp"

#include <algorithm>

namespace cognate {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string shape_of(const Value& v) {
  return std::visit(overloaded{
                        [](const IntVal&) { return std::string("an int"); },
                        [](const FloatVal&) { return std::string("a float"); },
                        [](const StrVal&) { return std::string("a string"); },
                        [](const RecordVal&) { return std::string("a record"); },
                        [](const ConstrVal& c) { return "constructor " + c.name; },
                        [](const ClosureVal&) { return std::string("a function"); },
                    },
                    v.raw());
}

}  // namespace

std::string_view to_string(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::UnboundVariable: return "unbound variable";
    case EvalErrorKind::MissingField: return "missing field";
    case EvalErrorKind::NotARecord: return "not a record";
    case EvalErrorKind::NotAClosure: return "not a function";
    case EvalErrorKind::MatchFailure: return "match failure";
    case EvalErrorKind::Foreign: return "foreign function failure";
    case EvalErrorKind::UnknownForeign: return "unknown foreign function";
    case EvalErrorKind::Arity: return "arity mismatch";
    case EvalErrorKind::DepthExceeded: return "evaluation too deep";
  }
  return "error";
}

VertexInfo describe(const RawValue& raw) {
  return std::visit(overloaded{
                        [](const IntVal& x) {
                          return VertexInfo{VertexKind::Int, std::to_string(x.value), static_cast<double>(x.value)};
                        },
                        [](const FloatVal& x) { return VertexInfo{VertexKind::Float, format_float(x.value), x.value}; },
                        [](const StrVal& x) { return VertexInfo{VertexKind::Str, quote_string(x.value), 0.0}; },
                        [](const RecordVal& x) {
                          std::string label = "{";
                          for (std::size_t i = 0; i < x.fields.size(); ++i) label += (i ? ", " : "") + x.fields[i].first;
                          return VertexInfo{VertexKind::Record, label + "}", 0.0};
                        },
                        [](const ConstrVal& x) { return VertexInfo{VertexKind::Constr, x.name, 0.0}; },
                        [](const ClosureVal&) { return VertexInfo{VertexKind::Closure, "<fun>", 0.0}; },
                    },
                    raw);
}

Value Heap::allocate(RawValue raw, std::span<const Address> deps) { return place(allocator_.fresh(), std::move(raw), deps); }

Value Heap::place(Address a, RawValue raw, std::span<const Address> deps) {
  builder_.add_in_star(deps, a);
  if (info_.size() <= a.id) info_.resize(a.id + 1);
  info_[a.id] = describe(raw);
  return std::visit([&](auto&& r) { return Value(std::move(r), a); }, std::move(raw));
}

Value Heap::allocate(RawValue raw, const VertexSet& deps) {
  const auto list = deps.to_vector();
  return allocate(std::move(raw), list);
}

MatchResult match(std::vector<Value> stack, const Continuation& k, SourceSpan span) {
  std::reverse(stack.begin(), stack.end());
  MatchResult out;
  const Continuation* cur = &k;
  while (!cur->is_term()) {
    if (stack.empty()) throw EvalError(EvalErrorKind::MatchFailure, "pattern expects more values", span);
    Value v = std::move(stack.back());
    stack.pop_back();
    std::visit(overloaded{
                   [&](const elim::Var& x) {
                     out.env = out.env.extend(x.name, std::move(v));
                     cur = &x.next;
                   },
                   [&](const elim::Record& x) {
                     const auto* rec = v.get_if<RecordVal>();
                     if (rec == nullptr) {
                       throw EvalError(EvalErrorKind::MatchFailure, "expected a record, got " + shape_of(v), span);
                     }
                     for (auto it = x.fields.rbegin(); it != x.fields.rend(); ++it) {
                       const Value* field = rec->find(*it);
                       if (field == nullptr) {
                         throw EvalError(EvalErrorKind::MatchFailure, "record has no field " + *it, span);
                       }
                       stack.push_back(*field);
                     }
                     out.consumed.push_back(v.addr());
                     cur = &x.next;
                   },
                   [&](const elim::Constr& x) {
                     const auto* c = v.get_if<ConstrVal>();
                     if (c == nullptr) {
                       throw EvalError(EvalErrorKind::MatchFailure, "expected a constructor, got " + shape_of(v), span);
                     }
                     const auto branch = x.branches.find(c->name);
                     if (branch == x.branches.end()) {
                       throw EvalError(EvalErrorKind::MatchFailure, "no branch for constructor " + c->name, span);
                     }
                     for (auto it = c->args.rbegin(); it != c->args.rend(); ++it) stack.push_back(*it);
                     out.consumed.push_back(v.addr());
                     cur = &branch->second;
                   },
               },
               cur->elim()->node);
  }
  if (!stack.empty()) throw EvalError(EvalErrorKind::MatchFailure, "too many values for pattern", span);
  out.branch = cur->term();
  return out;
}

namespace {
struct DepthGuard {
  std::size_t& depth;
  DepthGuard(std::size_t& d, std::size_t limit, SourceSpan span) : depth(d) {
    if (++depth > limit) {
      --depth;
      throw EvalError(EvalErrorKind::DepthExceeded, "evaluation exceeded depth " + std::to_string(limit), span);
    }
  }
  ~DepthGuard() { --depth; }
};
}  // namespace

Value Evaluator::eval(const Env& env, const Expr& e, const Demand& demand) {
  DepthGuard guard(depth_, limits_.max_depth, e.span);
  return std::visit(
      overloaded{
          [&](const expr::Var& x) -> Value {
            const Value* v = env.lookup(x.name);
            if (v == nullptr) throw EvalError(EvalErrorKind::UnboundVariable, "unbound variable " + x.name, e.span);
            return *v;
          },
          [&](const expr::Int& x) -> Value { return heap_.allocate(IntVal{x.value}, demand); },
          [&](const expr::Float& x) -> Value { return heap_.allocate(FloatVal{x.value}, demand); },
          [&](const expr::Str& x) -> Value { return heap_.allocate(StrVal{x.value}, demand); },
          [&](const expr::Let& x) -> Value {
            Value bound = eval(env, *x.bound, demand);
            return eval(env.extend(x.name, std::move(bound)), *x.body, demand);
          },
          [&](const expr::Record& x) -> Value {
            RecordVal rec;
            rec.fields.reserve(x.fields.size());
            for (const auto& [name, field] : x.fields) rec.fields.emplace_back(name, eval(env, *field, demand));
            return heap_.allocate(std::move(rec), demand);
          },
          [&](const expr::Project& x) -> Value {
            const Value rec = eval(env, *x.record, demand);
            const auto* r = rec.get_if<RecordVal>();
            if (r == nullptr) {
              throw EvalError(EvalErrorKind::NotARecord, "cannot project ." + x.field + " from " + shape_of(rec), e.span);
            }
            const Value* field = r->find(x.field);
            if (field == nullptr) throw EvalError(EvalErrorKind::MissingField, "record has no field " + x.field, e.span);
            return *field;
          },
          [&](const expr::Constr& x) -> Value {
            auto args = eval_seq(env, x.args, demand);
            return heap_.allocate(ConstrVal{x.name, std::move(args)}, demand);
          },
          [&](const expr::App& x) -> Value {
            const Value fn = eval(env, *x.fn, demand);
            const auto* closure = fn.get_if<ClosureVal>();
            if (closure == nullptr) throw EvalError(EvalErrorKind::NotAClosure, "cannot apply " + shape_of(fn), e.span);
            const Env recursive = close_defs(closure->env, closure->defs, Demand{fn.addr()});
            Value arg = eval(env, *x.arg, demand);
            MatchResult m = match({std::move(arg)}, ast::cont(closure->elim), e.span);
            Demand body_demand = std::move(m.consumed);
            body_demand.push_back(fn.addr());
            std::sort(body_demand.begin(), body_demand.end());
            body_demand.erase(std::unique(body_demand.begin(), body_demand.end()), body_demand.end());
            return eval(closure->env.concat(recursive).concat(m.env), *m.branch, body_demand);
          },
          [&](const expr::Foreign& x) -> Value {
            const auto args = eval_seq(env, x.args, demand);
            return apply_foreign(x.name, args, e.span);
          },
          [&](const expr::Fun& x) -> Value {
            static const RecDefsPtr no_defs = std::make_shared<const RecDefs>();
            return heap_.allocate(ClosureVal{env, no_defs, x.elim}, demand);
          },
          [&](const expr::LetRec& x) -> Value {
            return eval(env.concat(close_defs(env, x.defs, demand)), *x.body, demand);
          },
      },
      e.node);
}

std::vector<Value> Evaluator::eval_seq(const Env& env, std::span<const ExprPtr> es, const Demand& demand) {
  std::vector<Value> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(eval(env, *e, demand));
  return out;
}

Env Evaluator::close_defs(const Env& env, const RecDefsPtr& defs, const Demand& demand) {
  Env out;
  if (!defs) return out;
  for (const auto& [name, elim] : defs->defs) {
    out = out.extend(name, heap_.allocate(ClosureVal{env, defs, elim}, demand));
  }
  return out;
}

Value Evaluator::apply_foreign(std::string_view name, std::span<const Value> args, SourceSpan span) {
  const ForeignImpl* impl = foreign_.find(name);
  if (impl == nullptr) {
    throw EvalError(EvalErrorKind::UnknownForeign, "unknown foreign function " + std::string(name), span);
  }
  if (impl->arity != args.size()) {
    throw EvalError(EvalErrorKind::Arity,
                    impl->name + " expects " + std::to_string(impl->arity) + " argument(s), got " +
                        std::to_string(args.size()),
                    span);
  }
  return impl->apply(args, heap_, span);
}

}  // namespace cognate

#include <cmath>
#include <limits>

#include "cognate/eval.hpp"

namespace cognate {

namespace {

[[noreturn]] void fail(const std::string& fn, const std::string& what, SourceSpan span) {
  throw EvalError(EvalErrorKind::Foreign, fn + ": " + what, span);
}

struct Number {
  bool is_int = false;
  std::int64_t i = 0;
  double r = 0.0;
  double as_double() const { return is_int ? static_cast<double>(i) : r; }
};

std::optional<Number> number(const Value& v) {
  if (const auto* x = v.get_if<IntVal>()) return Number{true, x->value, 0.0};
  if (const auto* x = v.get_if<FloatVal>()) return Number{false, 0, x->value};
  return std::nullopt;
}

Number need_number(const std::string& fn, const Value& v, SourceSpan span) {
  const auto n = number(v);
  if (!n) fail(fn, "expected a number", span);
  return *n;
}

bool need_bool(const std::string& fn, const Value& v, SourceSpan span) {
  const auto* c = v.get_if<ConstrVal>();
  if (c != nullptr && c->args.empty()) {
    if (c->name == "True") return true;
    if (c->name == "False") return false;
  }
  fail(fn, "expected True or False", span);
}

std::vector<Address> roots(std::span<const Value> args) {
  std::vector<Address> out;
  out.reserve(args.size());
  for (const Value& v : args) out.push_back(v.addr());
  return out;
}

Value boolean(bool b, std::span<const Value> args, Heap& heap) {
  return heap.allocate(ConstrVal{b ? "True" : "False", {}}, roots(args));
}

using IntOp = bool (*)(std::int64_t, std::int64_t, std::int64_t*);

ForeignImpl arithmetic(std::string name, IntOp int_op, double (*float_op)(double, double)) {
  return ForeignImpl{name, 2, [name, int_op, float_op](std::span<const Value> args, Heap& heap, SourceSpan span) {
                       const Number a = need_number(name, args[0], span);
                       const Number b = need_number(name, args[1], span);
                       if (a.is_int && b.is_int) {
                         std::int64_t out = 0;
                         if (int_op(a.i, b.i, &out)) fail(name, "integer overflow", span);
                         return heap.allocate(IntVal{out}, roots(args));
                       }
                       return heap.allocate(FloatVal{float_op(a.as_double(), b.as_double())}, roots(args));
                     }};
}

int compare(const std::string& fn, const Value& a, const Value& b, SourceSpan span) {
  const auto x = number(a);
  const auto y = number(b);
  if (x && y) {
    if (x->is_int && y->is_int) return x->i < y->i ? -1 : (x->i > y->i ? 1 : 0);
    const double p = x->as_double();
    const double q = y->as_double();
    return p < q ? -1 : (p > q ? 1 : 0);
  }
  const auto* s = a.get_if<StrVal>();
  const auto* t = b.get_if<StrVal>();
  if (s != nullptr && t != nullptr) return s->value.compare(t->value) < 0 ? -1 : (s->value == t->value ? 0 : 1);
  fail(fn, "cannot compare these values", span);
}

ForeignImpl comparison(std::string name, bool (*test)(int)) {
  return ForeignImpl{name, 2, [name, test](std::span<const Value> args, Heap& heap, SourceSpan span) {
                       return boolean(test(compare(name, args[0], args[1], span)), args, heap);
                     }};
}

ForeignRegistry build_standard() {
  ForeignRegistry r;
  r.add(arithmetic(
      "plus", [](std::int64_t a, std::int64_t b, std::int64_t* o) { return __builtin_add_overflow(a, b, o); },
      [](double a, double b) { return a + b; }));
  r.add(arithmetic(
      "minus", [](std::int64_t a, std::int64_t b, std::int64_t* o) { return __builtin_sub_overflow(a, b, o); },
      [](double a, double b) { return a - b; }));
  r.add(arithmetic(
      "times", [](std::int64_t a, std::int64_t b, std::int64_t* o) { return __builtin_mul_overflow(a, b, o); },
      [](double a, double b) { return a * b; }));

  // Division is always real-valued.
  r.add({"div", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const Number a = need_number("div", args[0], span);
           const Number b = need_number("div", args[1], span);
           if (b.as_double() == 0.0) fail("div", "division by zero", span);
           return heap.allocate(FloatVal{a.as_double() / b.as_double()}, roots(args));
         }});
  r.add({"mod", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const Number a = need_number("mod", args[0], span);
           const Number b = need_number("mod", args[1], span);
           if (!a.is_int || !b.is_int) fail("mod", "expected integers", span);
           if (b.i == 0) fail("mod", "division by zero", span);
           if (a.i == std::numeric_limits<std::int64_t>::min() && b.i == -1) {
             return heap.allocate(IntVal{0}, roots(args));
           }
           return heap.allocate(IntVal{a.i % b.i}, roots(args));
         }});
  r.add({"pow", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const Number a = need_number("pow", args[0], span);
           const Number b = need_number("pow", args[1], span);
           if (a.is_int && b.is_int && b.i >= 0) {
             std::int64_t acc = 1;
             for (std::int64_t k = 0; k < b.i; ++k) {
               if (__builtin_mul_overflow(acc, a.i, &acc)) fail("pow", "integer overflow", span);
               if (acc == 0 || acc == 1) break;
             }
             return heap.allocate(IntVal{acc}, roots(args));
           }
           return heap.allocate(FloatVal{std::pow(a.as_double(), b.as_double())}, roots(args));
         }});

  r.add({"eq", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           return boolean(compare("eq", args[0], args[1], span) == 0, args, heap);
         }});
  r.add(comparison("lt", [](int c) { return c < 0; }));
  r.add(comparison("leq", [](int c) { return c <= 0; }));
  r.add(comparison("gt", [](int c) { return c > 0; }));
  r.add(comparison("geq", [](int c) { return c >= 0; }));

  r.add({"and", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const bool a = need_bool("and", args[0], span);
           const bool b = need_bool("and", args[1], span);
           return boolean(a && b, args, heap);
         }});
  r.add({"or", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const bool a = need_bool("or", args[0], span);
           const bool b = need_bool("or", args[1], span);
           return boolean(a || b, args, heap);
         }});
  r.add({"not", 1, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           return boolean(!need_bool("not", args[0], span), args, heap);
         }});

  r.add({"concat", 2, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const auto* a = args[0].get_if<StrVal>();
           const auto* b = args[1].get_if<StrVal>();
           if (a == nullptr || b == nullptr) fail("concat", "expected strings", span);
           return heap.allocate(StrVal{a->value + b->value}, roots(args));
         }});
  r.add({"intToFloat", 1, [](std::span<const Value> args, Heap& heap, SourceSpan span) {
           const Number a = need_number("intToFloat", args[0], span);
           return heap.allocate(FloatVal{a.as_double()}, roots(args));
         }});
  return r;
}

}  // namespace

const ForeignRegistry& ForeignRegistry::standard() {
  static const ForeignRegistry registry = build_standard();
  return registry;
}

void ForeignRegistry::add(ForeignImpl impl) {
  std::string name = impl.name;
  impls_[std::move(name)] = std::move(impl);
}

const ForeignImpl* ForeignRegistry::find(std::string_view name) const {
  auto it = impls_.find(name);
  return it == impls_.end() ? nullptr : &it->second;
}

ForeignSig ForeignRegistry::signature() const {
  ForeignSig sig;
  for (const auto& [name, impl] : impls_) sig.add(name, impl.arity);
  return sig;
}

std::vector<std::string> ForeignRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : impls_) out.push_back(name);
  return out;
}

ElimPtr foreign_wrapper(const std::string& name, std::size_t arity) {
  std::vector<std::string> params;
  std::vector<ExprPtr> args;
  for (std::size_t i = 1; i <= arity; ++i) {
    params.push_back("x" + std::to_string(i));
    args.push_back(ast::var(params.back()));
  }
  Continuation body = ast::term(ast::foreign(name, std::move(args)));
  for (std::size_t i = arity; i-- > 1;) {
    body = ast::term(ast::fun(ast::elim_var(params[i], std::move(body))));
  }
  return ast::elim_var(arity == 0 ? "_" : params[0], std::move(body));
}

}  // namespace cognate

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "cognate/eval.hpp"
#include "cognate/surface.hpp"

namespace cognate::surface {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += (out.empty() ? "" : "\n") + to_string(d);
  return out;
}

struct Failure {
  Diagnostic diagnostic;
};

[[noreturn]] void fail(std::string message, SourceSpan span) {
  throw Failure{Diagnostic{Severity::Error, std::move(message), span}};
}

const char* kind_name(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Var: return "variable";
    case Pattern::Kind::Wildcard: return "wildcard";
    case Pattern::Kind::Constr: return "constructor";
    case Pattern::Kind::Record: return "record";
    case Pattern::Kind::Int:
    case Pattern::Kind::Float:
    case Pattern::Kind::Str: return "literal";
  }
  return "pattern";
}

bool is_literal(const Pattern& p) {
  return p.kind == Pattern::Kind::Int || p.kind == Pattern::Kind::Float || p.kind == Pattern::Kind::Str;
}

std::string describe(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Var: return "variable " + p.name;
    case Pattern::Kind::Wildcard: return "'_'";
    case Pattern::Kind::Constr: return "constructor " + p.name;
    case Pattern::Kind::Record: return "record pattern";
    default: return "literal pattern";
  }
}

void collect_pattern_vars(const Pattern& p, std::vector<std::pair<std::string, SourceSpan>>& out) {
  if (p.kind == Pattern::Kind::Var) out.emplace_back(p.name, p.span);
  for (const auto& a : p.args) collect_pattern_vars(a, out);
}

void free_names(const SExpr& e, std::set<std::string>& out);

void free_names_clause(const Clause& c, std::set<std::string>& out) { free_names(*c.body, out); }

void free_names(const SExpr& e, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const sx::Var& x) { out.insert(x.name); },
                 [](const sx::Int&) {},
                 [](const sx::Float&) {},
                 [](const sx::Str&) {},
                 [&](const sx::Let& x) {
                   for (const auto& b : x.bindings) {
                     if (b.kind == Binding::Kind::Value) free_names(*b.value, out);
                     for (const auto& c : b.def.clauses) free_names_clause(c, out);
                   }
                   free_names(*x.body, out);
                 },
                 [&](const sx::Lambda& x) { free_names_clause(x.clause, out); },
                 [&](const sx::If& x) {
                   free_names(*x.cond, out);
                   free_names(*x.then_branch, out);
                   free_names(*x.else_branch, out);
                 },
                 [&](const sx::Match& x) {
                   free_names(*x.scrutinee, out);
                   for (const auto& c : x.clauses) free_names_clause(c, out);
                 },
                 [&](const sx::BinOp& x) {
                   if (x.op != "!=") out.insert(std::string(operator_function(x.op)));
                   free_names(*x.lhs, out);
                   free_names(*x.rhs, out);
                 },
                 [&](const sx::Neg& x) { free_names(*x.operand, out); },
                 [&](const sx::App& x) {
                   free_names(*x.fn, out);
                   free_names(*x.arg, out);
                 },
                 [&](const sx::Proj& x) { free_names(*x.record, out); },
                 [&](const sx::Constr& x) {
                   for (const auto& a : x.args) free_names(*a, out);
                 },
                 [&](const sx::Record& x) {
                   for (const auto& [_, f] : x.fields) free_names(*f, out);
                 },
             },
             e.node);
}

std::set<std::string> binding_names(const Binding& b) {
  std::set<std::string> out;
  if (b.kind == Binding::Kind::Value) free_names(*b.value, out);
  for (const auto& c : b.def.clauses) free_names_clause(c, out);
  return out;
}

// One clause on its way through the trie: the subpatterns still to match for
// the current parameter, and the parameters after it.
struct Row {
  std::vector<const Pattern*> stack;
  bool whole_parameter = true;
  std::vector<const Pattern*> later;
  ExprPtr body;
  std::size_t clause = 0;
};

class Desugarer {
 public:
  explicit Desugarer(const ConstructorSig& sig) : sig_(sig) {}

  ExprPtr expr(const SExpr& e) {
    const SourceSpan span = e.span;
    return std::visit(
        overloaded{
            [&](const sx::Var& x) { return ast::var(x.name, span); },
            [&](const sx::Int& x) { return ast::integer(x.value, span); },
            [&](const sx::Float& x) { return ast::floating(x.value, span); },
            [&](const sx::Str& x) { return ast::string(x.value, span); },
            [&](const sx::Let& x) { return bindings(x.bindings, expr(*x.body), false); },
            [&](const sx::Lambda& x) { return function({x.clause}, "function", span); },
            [&](const sx::If& x) {
              std::map<std::string, Continuation> branches;
              branches.emplace("True", ast::term(expr(*x.then_branch)));
              branches.emplace("False", ast::term(expr(*x.else_branch)));
              return ast::app(ast::fun(ast::elim_constr(std::move(branches)), span), expr(*x.cond), span);
            },
            [&](const sx::Match& x) {
              ExprPtr scrutinee = expr(*x.scrutinee);
              return ast::app(function(x.clauses, "match", span), std::move(scrutinee), span);
            },
            [&](const sx::BinOp& x) {
              ExprPtr lhs = expr(*x.lhs);
              ExprPtr rhs = expr(*x.rhs);
              if (x.op == "!=") {
                return ast::foreign("not", {ast::foreign("eq", {std::move(lhs), std::move(rhs)}, span)}, span);
              }
              const auto name = operator_function(x.op);
              if (name.empty()) fail("unknown operator " + x.op, span);
              return ast::foreign(std::string(name), {std::move(lhs), std::move(rhs)}, span);
            },
            [&](const sx::Neg& x) { return ast::foreign("minus", {ast::integer(0, span), expr(*x.operand)}, span); },
            [&](const sx::App& x) {
              ExprPtr fn = expr(*x.fn);
              return ast::app(std::move(fn), expr(*x.arg), span);
            },
            [&](const sx::Proj& x) { return ast::project(expr(*x.record), x.field, span); },
            [&](const sx::Constr& x) {
              std::vector<ExprPtr> args;
              for (const auto& a : x.args) args.push_back(expr(*a));
              return ast::constr(x.name, std::move(args), span);
            },
            [&](const sx::Record& x) {
              std::vector<std::pair<std::string, ExprPtr>> fields;
              for (const auto& [name, f] : x.fields) fields.emplace_back(name, expr(*f));
              return ast::record(std::move(fields), span);
            },
        },
        e.node);
  }

  // Merges the clauses of one function into nested eliminators.
  ExprPtr function(const std::vector<Clause>& clauses, const std::string& name, SourceSpan span) {
    const std::size_t arity = clauses.front().params.size();
    std::vector<Row> rows;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const Clause& c = clauses[i];
      if (c.params.size() != arity) {
        fail("clause " + std::to_string(i + 1) + " of " + name + " has " + std::to_string(c.params.size()) +
                 " parameter(s), expected " + std::to_string(arity),
             c.span);
      }
      std::vector<std::pair<std::string, SourceSpan>> vars;
      for (const auto& p : c.params) collect_pattern_vars(p, vars);
      std::set<std::string> seen;
      for (const auto& [v, vspan] : vars) {
        if (!seen.insert(v).second) fail("variable " + v + " is bound twice in clause " + std::to_string(i + 1) + " of " + name, vspan);
      }
      Row row;
      row.stack = {&c.params[0]};
      for (std::size_t k = 1; k < arity; ++k) row.later.push_back(&c.params[k]);
      row.body = expr(*c.body);
      row.clause = i + 1;
      rows.push_back(std::move(row));
    }
    name_ = name;
    span_ = span;
    return ast::fun(elim(std::move(rows), 1), span);
  }

  ExprPtr bindings(const std::vector<Binding>& items, ExprPtr body, bool top_level) {
    struct Segment {
      const Binding* value = nullptr;
      std::vector<Definition> block;
    };
    std::vector<Segment> segments;
    for (const Binding& b : items) {
      if (b.kind == Binding::Kind::Data) {
        if (!top_level) fail("data declarations are only allowed at top level", b.span);
        continue;
      }
      if (b.kind == Binding::Kind::Value) {
        segments.push_back(Segment{&b, {}});
        continue;
      }
      if (segments.empty() || segments.back().value != nullptr) segments.emplace_back();
      auto& block = segments.back().block;
      if (!block.empty() && block.back().name == b.def.name) {
        for (const auto& c : b.def.clauses) block.back().clauses.push_back(c);
        continue;
      }
      for (const auto& d : block) {
        if (d.name == b.def.name) fail("clauses of " + b.def.name + " must be contiguous", b.span);
      }
      block.push_back(b.def);
    }

    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      if (it->value != nullptr) {
        body = value_binding(*it->value, std::move(body));
      } else {
        body = function_block(it->block, std::move(body));
      }
    }
    return body;
  }

 private:
  ExprPtr value_binding(const Binding& b, ExprPtr body) {
    if (b.pattern.kind == Pattern::Kind::Var) return ast::let(b.pattern.name, expr(*b.value), std::move(body), b.span);
    Row row;
    row.stack = {&b.pattern};
    row.body = std::move(body);
    row.clause = 1;
    name_ = "pattern binding";
    span_ = b.span;
    std::vector<Row> rows;
    rows.push_back(std::move(row));
    ExprPtr fn = ast::fun(elim(std::move(rows), 1), b.span);
    return ast::app(std::move(fn), expr(*b.value), b.span);
  }

  // Splits a block of function definitions into strongly connected
  // components and nests them, dependencies outermost.
  ExprPtr function_block(const std::vector<Definition>& defs, ExprPtr body) {
    const std::size_t n = defs.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[defs[i].name] = i;
    std::vector<std::vector<std::size_t>> refs(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::string> names;
      for (const auto& c : defs[i].clauses) free_names_clause(c, names);
      for (const auto& name : names) {
        if (auto it = index.find(name); it != index.end()) refs[i].push_back(it->second);
      }
    }

    // Tarjan; components come out dependencies first.
    std::vector<int> order(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
      order[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (std::size_t w : refs[v]) {
        if (order[w] < 0) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
      }
      if (low[v] == order[v]) {
        std::vector<std::size_t> comp;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (order[i] < 0) visit(i);
    }

    std::vector<RecDefsPtr> blocks;
    for (const auto& comp : components) {
      auto defs_out = std::make_shared<RecDefs>();
      for (std::size_t i : comp) {
        const ExprPtr fn = function(defs[i].clauses, defs[i].name, defs[i].span);
        defs_out->defs.emplace_back(defs[i].name, std::get<expr::Fun>(fn->node).elim);
      }
      blocks.push_back(std::move(defs_out));
    }
    for (std::size_t k = blocks.size(); k-- > 0;) {
      body = ast::letrec(blocks[k], std::move(body), defs[components[k].front()].span);
    }
    return body;
  }

  std::string column_name(std::size_t column) const {
    return name_ + ", parameter " + std::to_string(column);
  }

  ElimPtr elim(std::vector<Row> rows, std::size_t column) {
    const Pattern& first = *rows.front().stack.front();
    for (const Row& r : rows) {
      const Pattern& p = *r.stack.front();
      const bool same_family = (p.kind == first.kind) || (is_literal(p) && is_literal(first)) ||
                               (p.kind == Pattern::Kind::Var && first.kind == Pattern::Kind::Wildcard) ||
                               (p.kind == Pattern::Kind::Wildcard && first.kind == Pattern::Kind::Var);
      if (!same_family) {
        fail(column_name(column) + ": " + describe(first) + " in clause " + std::to_string(rows.front().clause) +
                 " is aligned with " + std::string(kind_name(p)) + " pattern in clause " + std::to_string(r.clause) +
                 " before the clauses are distinguished",
             p.span);
      }
    }

    switch (first.kind) {
      case Pattern::Kind::Var:
      case Pattern::Kind::Wildcard: return variable(std::move(rows), column);
      case Pattern::Kind::Constr: return constructor(std::move(rows), column);
      case Pattern::Kind::Record: return record(std::move(rows), column);
      default: return literal(std::move(rows), column);
    }
  }

  static std::vector<Row> pop(std::vector<Row> rows) {
    for (Row& r : rows) {
      r.stack.erase(r.stack.begin());
      r.whole_parameter = false;
    }
    return rows;
  }

  ElimPtr variable(std::vector<Row> rows, std::size_t column) {
    const Pattern& first = *rows.front().stack.front();
    for (const Row& r : rows) {
      const Pattern& p = *r.stack.front();
      if (p.kind != first.kind || p.name != first.name) {
        fail(column_name(column) + ": " + describe(first) + " in clause " + std::to_string(rows.front().clause) +
                 " and " + describe(p) + " in clause " + std::to_string(r.clause) +
                 " are aligned but do not have the same name",
             p.span);
      }
    }
    return ast::elim_var(first.name, cont(pop(std::move(rows)), column));
  }

  ElimPtr constructor(std::vector<Row> rows, std::size_t column) {
    std::map<std::string, std::vector<Row>> groups;
    for (Row& r : rows) {
      const Pattern& p = *r.stack.front();
      const auto arity = sig_.arity(p.name);
      if (!arity) fail("unknown constructor " + p.name, p.span);
      if (*arity != p.args.size()) {
        fail("constructor pattern " + p.name + " expects " + std::to_string(*arity) + " argument(s)", p.span);
      }
      Row next = r;
      next.stack.erase(next.stack.begin());
      std::vector<const Pattern*> pushed;
      for (const auto& a : p.args) pushed.push_back(&a);
      next.stack.insert(next.stack.begin(), pushed.begin(), pushed.end());
      next.whole_parameter = false;
      groups[p.name].push_back(std::move(next));
    }
    std::map<std::string, Continuation> branches;
    for (auto& [name, group] : groups) branches.emplace(name, cont(std::move(group), column));
    return ast::elim_constr(std::move(branches));
  }

  ElimPtr record(std::vector<Row> rows, std::size_t column) {
    auto sorted_fields = [](const Pattern& p) {
      std::vector<std::pair<std::string, const Pattern*>> out;
      for (std::size_t i = 0; i < p.fields.size(); ++i) out.emplace_back(p.fields[i], &p.args[i]);
      std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      return out;
    };
    const auto reference = sorted_fields(*rows.front().stack.front());
    std::vector<std::string> names;
    for (const auto& [name, _] : reference) names.push_back(name);
    for (Row& r : rows) {
      const auto fields = sorted_fields(*r.stack.front());
      std::vector<std::string> these;
      for (const auto& [name, _] : fields) these.push_back(name);
      if (these != names) {
        fail(column_name(column) + ": record patterns in clauses " + std::to_string(rows.front().clause) + " and " +
                 std::to_string(r.clause) + " name different fields",
             r.stack.front()->span);
      }
      r.stack.erase(r.stack.begin());
      std::vector<const Pattern*> pushed;
      for (const auto& [_, p] : fields) pushed.push_back(p);
      r.stack.insert(r.stack.begin(), pushed.begin(), pushed.end());
      r.whole_parameter = false;
    }
    return ast::elim_record(std::move(names), cont(std::move(rows), column));
  }

  ElimPtr literal(std::vector<Row> rows, std::size_t column) {
    const Pattern& first = *rows.front().stack.front();
    for (const Row& r : rows) {
      const Pattern& p = *r.stack.front();
      if (!r.whole_parameter || r.stack.size() != 1) {
        fail(column_name(column) + ": literal patterns are only supported as whole parameters", p.span);
      }
      if (p.kind != first.kind) {
        fail(column_name(column) + ": literal patterns of different types are aligned", p.span);
      }
    }
    const std::string scrutinee = "$" + std::to_string(fresh_++);

    struct Group {
      const Pattern* literal;
      std::vector<Row> rows;
    };
    std::vector<Group> groups;
    auto same = [](const Pattern& a, const Pattern& b) {
      switch (a.kind) {
        case Pattern::Kind::Int: return a.int_value == b.int_value;
        case Pattern::Kind::Float: return a.float_value == b.float_value;
        default: return a.name == b.name;
      }
    };
    for (Row& r : rows) {
      const Pattern* p = r.stack.front();
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return same(*g.literal, *p); });
      if (it == groups.end()) {
        groups.push_back(Group{p, {}});
        it = groups.end() - 1;
      }
      it->rows.push_back(std::move(r));
    }

    auto literal_expr = [](const Pattern& p) {
      switch (p.kind) {
        case Pattern::Kind::Int: return ast::integer(p.int_value, p.span);
        case Pattern::Kind::Float: return ast::floating(p.float_value, p.span);
        default: return ast::string(p.name, p.span);
      }
    };

    // No literal matched: apply an eliminator with no branches.
    ExprPtr chain = ast::app(ast::fun(ast::elim_constr({}), first.span), ast::var(scrutinee), first.span);
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      Continuation hit = cont(pop(std::move(it->rows)), column);
      std::map<std::string, Continuation> branches;
      branches.emplace("True", std::move(hit));
      branches.emplace("False", ast::term(chain));
      ExprPtr test = ast::foreign("eq", {ast::var(scrutinee), literal_expr(*it->literal)}, it->literal->span);
      chain = ast::app(ast::fun(ast::elim_constr(std::move(branches)), first.span), std::move(test), first.span);
    }
    return ast::elim_var(scrutinee, ast::term(std::move(chain)));
  }

  Continuation cont(std::vector<Row> rows, std::size_t column) {
    if (!rows.front().stack.empty()) return ast::cont(elim(std::move(rows), column));
    if (!rows.front().later.empty()) {
      for (Row& r : rows) {
        r.stack = {r.later.front()};
        r.later.erase(r.later.begin());
        r.whole_parameter = true;
      }
      return ast::term(ast::fun(elim(std::move(rows), column + 1), span_));
    }
    if (rows.size() > 1) {
      fail(name_ + ": clauses " + std::to_string(rows[0].clause) + " and " + std::to_string(rows[1].clause) +
               " cannot be distinguished",
           span_);
    }
    return ast::term(rows.front().body);
  }

  const ConstructorSig& sig_;
  std::string name_;
  SourceSpan span_;
  std::size_t fresh_ = 0;
};

}  // namespace

DesugarError::DesugarError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> check_clauses(const Definition& def, const ConstructorSig& sig) {
  if (def.clauses.empty()) return {Diagnostic{Severity::Error, def.name + " has no clauses", def.span}};
  try {
    Desugarer d(sig);
    d.function(def.clauses, def.name, def.span);
    return {};
  } catch (const Failure& f) {
    return {f.diagnostic};
  }
}

ExprPtr desugar(const Program& program, const ConstructorSig& sig) {
  try {
    Desugarer d(sig);
    ExprPtr body = d.expr(*program.main);
    return d.bindings(program.items, std::move(body), true);
  } catch (const Failure& f) {
    throw DesugarError({f.diagnostic});
  }
}

const Program& library() {
  static const Program lib = parse(R"(
map f [] = [];
map f (x : xs) = f x : map f xs;

filter p [] = [];
filter p (x : xs) = if p x then x : filter p xs else filter p xs;

foldl f acc [] = acc;
foldl f acc (x : xs) = foldl f (f acc x) xs;

foldr f z [] = z;
foldr f z (x : xs) = f x (foldr f z xs);

length [] = 0;
length (x : xs) = 1 + length xs;

append [] ys = ys;
append (x : xs) ys = x : append xs ys;

flatten [] = [];
flatten (xs : xss) = append xs (flatten xss);

concatMap f xs = flatten (map f xs);

reverse xs = foldl (fun acc x -> x : acc) [] xs;

sum xs = foldl (+) 0 xs;

zipWith f [] ys = [];
zipWith f (x : xs) [] = [];
zipWith f (x : xs) (y : ys) = f x y : zipWith f xs ys;

zip xs ys = zipWith (fun x y -> (x, y)) xs ys;

head (x : xs) = x;
tail (x : xs) = xs;

nth (x : xs) i = if i == 0 then x else nth xs (i - 1);

take n xs = if n == 0 then [] else match xs with { [] -> []; y : ys -> y : take (n - 1) ys };
drop n xs = if n == 0 then xs else match xs with { [] -> []; y : ys -> drop (n - 1) ys };

range a b = if a >= b then [] else a : range (a + 1) b;

fst (a, b) = a;
snd (a, b) = b;

max a b = if a >= b then a else b;
min a b = if a <= b then a else b;
abs a = if a < 0 then 0 - a else a;

maximum (x : xs) = foldl max x xs;
minimum (x : xs) = foldl min x xs;

last (x : xs) = match xs with { [] -> x; y : ys -> last xs };

0
)");
  return lib;
}

ExprPtr compile(std::string_view text, const CompileOptions& options) {
  const ConstructorSig standard_sig = ConstructorSig::standard();
  const ConstructorSig& sig = options.sig != nullptr ? *options.sig : standard_sig;
  const ForeignSig fsig = options.foreign != nullptr ? *options.foreign : ForeignRegistry::standard().signature();

  const Program program = parse(text, sig);
  std::vector<Binding> lib_items;
  if (options.with_library) {
    std::set<std::string> wanted;
    free_names(*program.main, wanted);
    for (const auto& b : program.items) {
      const auto names = binding_names(b);
      wanted.insert(names.begin(), names.end());
    }
    const auto& lib = library().items;
    std::vector<bool> chosen(lib.size(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < lib.size(); ++i) {
        if (chosen[i] || !wanted.count(lib[i].def.name)) continue;
        chosen[i] = true;
        changed = true;
        const auto names = binding_names(lib[i]);
        wanted.insert(names.begin(), names.end());
      }
    }
    for (std::size_t i = 0; i < lib.size(); ++i) {
      if (chosen[i]) lib_items.push_back(lib[i]);
    }
  }

  ExprPtr core;
  try {
    Desugarer d(sig);
    ExprPtr body = d.expr(*program.main);
    body = d.bindings(program.items, std::move(body), true);
    core = d.bindings(lib_items, std::move(body), true);
  } catch (const Failure& f) {
    throw DesugarError({f.diagnostic});
  }
  auto errors = validate(*core, sig, fsig);
  if (!errors.empty()) throw DesugarError(std::move(errors));
  return core;
}

}  // namespace cognate::surface

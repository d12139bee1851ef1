#include <doctest.h>

#include "cognate/eval.hpp"
#include "cognate/session.hpp"
#include "cognate/surface.hpp"

using namespace cognate;

namespace {

struct Fixture {
  Heap heap;
  Evaluator ev{heap, ForeignRegistry::standard()};

  Value eval(const ExprPtr& e, const Demand& v = {}, const Env& env = {}) { return ev.eval(env, *e, v); }
  DepGraph graph() const { return heap.snapshot(); }
};

PlainTerm run_source(std::string_view text) {
  const ExprPtr core = surface::compile(text);
  return erase(run(*core, {}).result);
}

}  // namespace

TEST_CASE("literals allocate a fresh vertex demanded by V") {
  Fixture f;
  const Value a = f.eval(ast::integer(1));
  const Value b = f.eval(ast::floating(2.5), {a.addr()});
  CHECK(a.addr() != b.addr());
  const DepGraph g = f.graph();
  CHECK(g.has_edge({a.addr(), b.addr()}));
  CHECK(g.edge_count() == 1);
  CHECK(f.heap.info()[b.addr().id].label == "2.5");
}

TEST_CASE("variables and projections leave the graph unchanged") {
  Fixture f;
  const Value r = f.eval(ast::record({{"x", ast::integer(5)}, {"y", ast::string("s")}}));
  const auto before = f.graph().edge_count();
  const auto vertices = f.graph().vertex_count();
  const Env env = Env{}.extend("r", r);
  const Value x = f.eval(ast::project(ast::var("r"), "x"), {}, env);
  const Value same = f.eval(ast::var("r"), {}, env);
  CHECK(x.get_if<IntVal>()->value == 5);
  CHECK(same.addr() == r.addr());
  CHECK(f.graph().edge_count() == before);
  CHECK(f.graph().vertex_count() == vertices);
}

TEST_CASE("foreign results depend on argument roots only") {
  Fixture f;
  const Value one = f.eval(ast::integer(1));
  const Value two = f.eval(ast::integer(2));
  const Value ambient = f.eval(ast::integer(9));
  const Env env = Env{}.extend("a", one).extend("b", two);
  const Value sum = f.eval(ast::foreign("plus", {ast::var("a"), ast::var("b")}), {ambient.addr()}, env);
  CHECK(sum.get_if<IntVal>()->value == 3);
  const DepGraph g = f.graph();
  CHECK(g.predecessors(sum.addr()).size() == 2);
  CHECK(g.has_edge({one.addr(), sum.addr()}));
  CHECK_FALSE(g.has_edge({ambient.addr(), sum.addr()}));
}

TEST_CASE("application demands the closure and the matched parts") {
  Fixture f;
  // (fun (Cons x xs) -> x) applied to Cons 7 Nil
  const ElimPtr head = ast::elim_constr({{"Cons", ast::cont(ast::elim_var("x", ast::cont(ast::elim_var("xs", ast::term(ast::integer(0))))))}});
  const Value list = f.eval(ast::constr("Cons", {ast::integer(7), ast::constr("Nil")}));
  const Value fn = f.eval(ast::fun(head));
  const Env env = Env{}.extend("l", list).extend("f", fn);
  const Value out = f.eval(ast::app(ast::var("f"), ast::var("l")), {}, env);
  const DepGraph g = f.graph();
  // the body literal depends on the closure and on the matched cons cell, not on the head element
  CHECK(g.has_edge({fn.addr(), out.addr()}));
  CHECK(g.has_edge({list.addr(), out.addr()}));
  CHECK(g.predecessors(out.addr()).size() == 2);
}

TEST_CASE("close_defs allocates one closure per definition under the demand") {
  Fixture f;
  auto defs = std::make_shared<RecDefs>();
  defs->defs.emplace_back("f", ast::elim_var("x", ast::term(ast::var("x"))));
  defs->defs.emplace_back("g", ast::elim_var("y", ast::term(ast::var("y"))));
  const Value v = f.eval(ast::integer(0));
  const Env env = f.ev.close_defs(Env{}, defs, {v.addr()});
  const auto bindings = env.bindings();
  REQUIRE(bindings.size() == 2);
  CHECK(bindings[0].first == "f");
  CHECK(bindings[1].first == "g");
  CHECK(bindings[0].second.addr().id < bindings[1].second.addr().id);
  for (const auto& [_, c] : bindings) CHECK(f.graph().has_edge({v.addr(), c.addr()}));
}

TEST_CASE("match pushes constructor arguments and records consumed addresses") {
  Fixture f;
  const Value pair = f.eval(ast::constr("Pair", {ast::integer(1), ast::integer(2)}));
  const Continuation k = ast::cont(ast::elim_constr(
      {{"Pair", ast::cont(ast::elim_var("a", ast::cont(ast::elim_var("b", ast::term(ast::var("b"))))))}}));
  const MatchResult m = match({pair}, k);
  CHECK(m.env.lookup("a")->get_if<IntVal>()->value == 1);
  CHECK(m.env.lookup("b")->get_if<IntVal>()->value == 2);
  CHECK(m.consumed == Demand{pair.addr()});
  CHECK_THROWS_AS(match({f.eval(ast::integer(3))}, k), EvalError);
}

TEST_CASE("evaluation errors carry their kind") {
  Fixture f;
  auto kind = [&](const ExprPtr& e) {
    try {
      f.eval(e);
    } catch (const EvalError& err) {
      return err.kind();
    }
    FAIL("no error");
    return EvalErrorKind::Arity;
  };
  CHECK(kind(ast::var("nope")) == EvalErrorKind::UnboundVariable);
  CHECK(kind(ast::project(ast::integer(1), "x")) == EvalErrorKind::NotARecord);
  CHECK(kind(ast::project(ast::record({}), "x")) == EvalErrorKind::MissingField);
  CHECK(kind(ast::app(ast::integer(1), ast::integer(2))) == EvalErrorKind::NotAClosure);
  CHECK(kind(ast::foreign("div", {ast::integer(1), ast::integer(0)})) == EvalErrorKind::Foreign);
  CHECK(kind(ast::foreign("nope", {})) == EvalErrorKind::UnknownForeign);
  CHECK(kind(ast::foreign("plus", {ast::integer(1)})) == EvalErrorKind::Arity);
}

TEST_CASE("deep recursion is bounded") {
  Heap heap;
  Evaluator ev(heap, ForeignRegistry::standard(), EvalLimits{200});
  const ExprPtr core = surface::compile("loop n = loop (n + 1);\nloop 0");
  CHECK_THROWS_AS(ev.eval(Env{}, *core, {}), EvalError);
}

TEST_CASE("primitive arithmetic") {
  CHECK(run_source("1 + 2 * 3") == PlainTerm::integer(7));
  CHECK(run_source("7 / 2") == PlainTerm::floating(3.5));
  CHECK(run_source("7 % 3") == PlainTerm::integer(1));
  CHECK(run_source("2 ^ 10") == PlainTerm::integer(1024));
  CHECK(run_source("1 + 0.5") == PlainTerm::floating(1.5));
  CHECK(run_source("-3 + 1") == PlainTerm::integer(-2));
  CHECK(run_source("\"ab\" ++ \"cd\"") == PlainTerm::string("abcd"));
  CHECK(run_source("3 < 4 && 4 <= 4") == PlainTerm::constr("True"));
  CHECK(run_source("3 != 3 || 2 > 5") == PlainTerm::constr("False"));
  CHECK(run_source("intToFloat 2") == PlainTerm::floating(2.0));
}

TEST_CASE("plain values erase addresses") {
  const PlainTerm t = run_source("{b: [1, 2], a: Some \"x\"}");
  CHECK(to_string(t) == "{a: Some(\"x\"), b: [1, 2]}");
  CHECK(to_string(run_source("fun x -> x")) == "<fun>");
}

TEST_CASE("addresses_of includes closure environments") {
  const ExprPtr core = surface::compile("let k = 41 in fun x -> k");
  const Session s = run(*core, {});
  const VertexSet addrs = addresses_of(s.result);
  CHECK(addrs.contains(s.result.addr()));
  CHECK(addrs.size() >= 2);
}

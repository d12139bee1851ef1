#include <doctest.h>

#include "cognate/session.hpp"
#include "cognate/surface.hpp"

using namespace cognate;
using namespace cognate::surface;

namespace {

Definition definition_of(std::string_view text) {
  const Program p = parse(std::string(text) + "\n0");
  REQUIRE(!p.items.empty());
  Definition d = p.items.front().def;
  for (std::size_t i = 1; i < p.items.size(); ++i) {
    for (const auto& c : p.items[i].def.clauses) d.clauses.push_back(c);
  }
  return d;
}

PlainTerm eval_text(std::string_view text, const std::vector<Dataset>& data = {}) {
  return erase(run(*compile(text), data).result);
}

}  // namespace

TEST_CASE("syntax errors report line and column") {
  try {
    parse("f x = x +;\nf 1");
    FAIL("accepted");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line == 1);
    CHECK(e.span().column == 10);
  }
  try {
    parse("let x = 1;\n\n  (x");
    FAIL("accepted");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line == 3);
  }
  CHECK_THROWS_AS(parse("Cons 1"), SyntaxError);
  CHECK_THROWS_AS(parse("\"open"), SyntaxError);
  CHECK_THROWS_AS(parse("f x = 1;"), SyntaxError);
}

TEST_CASE("aligned patterns: baz is accepted, foo and bar are not") {
  const Definition baz = definition_of("baz (Cons y ys) x = 1;\nbaz Nil x = 2;");
  CHECK(check_clauses(baz).empty());

  const Definition foo = definition_of("foo (Cons y ys) (Cons z zs) = 1;\nfoo x Nil = 2;");
  const auto foo_diags = check_clauses(foo);
  REQUIRE(foo_diags.size() == 1);
  CHECK(foo_diags[0].message.find("aligned") != std::string::npos);
  CHECK(foo_diags[0].message.find("parameter 1") != std::string::npos);

  const Definition bar = definition_of("bar x = 1;\nbar y = 2;");
  const auto bar_diags = check_clauses(bar);
  REQUIRE(bar_diags.size() == 1);
  CHECK(bar_diags[0].message.find("same name") != std::string::npos);

  CHECK_THROWS_AS(compile("foo (Cons y ys) (Cons z zs) = 1;\nfoo x Nil = 2;\nfoo [] []"), DesugarError);
}

TEST_CASE("other clause restrictions") {
  CHECK_FALSE(check_clauses(definition_of("f x y = 1;\nf x = 2;")).empty());
  CHECK_FALSE(check_clauses(definition_of("f x x = 1;")).empty());
  CHECK_FALSE(check_clauses(definition_of("f Nil = 1;\nf Nil = 2;")).empty());
  CHECK_FALSE(check_clauses(definition_of("f (Cons 1 xs) = 1;\nf Nil = 2;")).empty());
  CHECK_FALSE(check_clauses(definition_of("f {a} = 1;\nf {b} = 2;")).empty());
  CHECK(check_clauses(definition_of("f 0 = \"zero\";\nf 1 = \"one\";")).empty());
  CHECK_THROWS_AS(compile("g Nil = 1;\nh x = 2;\ng (Cons x xs) = 3;\ng []"), DesugarError);
}

TEST_CASE("desugaring is deterministic") {
  const std::string text = "data xs;\nsq x = x * x;\nsumsq ys = sum (map sq ys);\nsumsq xs";
  const std::string first = to_debug(*compile(text));
  for (int i = 0; i < 5; ++i) CHECK(to_debug(*compile(text)) == first);
  CHECK(to_debug(*desugar(parse(text))) == to_debug(*desugar(parse(text))));
}

TEST_CASE("sugar forms") {
  CHECK(eval_text("if 1 < 2 then \"y\" else \"n\"") == PlainTerm::string("y"));
  CHECK(eval_text("match [1, 2] with { [] -> 0; x : xs -> x }") == PlainTerm::integer(1));
  CHECK(eval_text("let (a, b) = (3, 4) in a * b") == PlainTerm::integer(12));
  CHECK(eval_text("let {x, y: z} = {x: 1, y: 2} in x + z") == PlainTerm::integer(3));
  CHECK(eval_text("(fun x y -> x - y) 5 2") == PlainTerm::integer(3));
  CHECK(eval_text("{p: 1}.p") == PlainTerm::integer(1));
  CHECK(eval_text("foldl (+) 0 [1, 2, 3]") == PlainTerm::integer(6));
  CHECK(eval_text("f 0 = \"zero\";\nf 1 = \"one\";\nf 1") == PlainTerm::string("one"));
  CHECK(eval_text("let two = 2; three = 3 in two * three") == PlainTerm::integer(6));
}

TEST_CASE("mutual recursion through grouped definitions") {
  const std::string text =
      "even 0 = True;\neven n = odd (n - 1);\nodd n = if n == 0 then False else even (n - 1);\neven 10";
  // literal and variable patterns cannot share a column
  CHECK_THROWS_AS(compile(text), DesugarError);
  const std::string ok =
      "even n = if n == 0 then True else odd (n - 1);\nodd n = if n == 0 then False else even (n - 1);\neven 7";
  CHECK(eval_text(ok) == PlainTerm::constr("False"));
}

TEST_CASE("library functions") {
  CHECK(to_string(eval_text("map (fun x -> x * 2) [1, 2, 3]")) == "[2, 4, 6]");
  CHECK(to_string(eval_text("filter (fun x -> x > 1) [1, 2, 3]")) == "[2, 3]");
  CHECK(to_string(eval_text("reverse [1, 2, 3]")) == "[3, 2, 1]");
  CHECK(to_string(eval_text("append [1] [2]")) == "[1, 2]");
  CHECK(to_string(eval_text("zip [1, 2] [3, 4, 5]")) == "[Pair(1, 3), Pair(2, 4)]");
  CHECK(to_string(eval_text("take 2 (range 0 5)")) == "[0, 1]");
  CHECK(to_string(eval_text("drop 3 (range 0 5)")) == "[3, 4]");
  CHECK(eval_text("length [4, 5, 6]") == PlainTerm::integer(3));
  CHECK(eval_text("nth [4, 5, 6] 1") == PlainTerm::integer(5));
  CHECK(eval_text("maximum [4, 9, 6]") == PlainTerm::integer(9));
  CHECK(eval_text("last [4, 9, 6]") == PlainTerm::integer(6));
  CHECK(to_string(eval_text("concatMap (fun x -> [x, x]) [1, 2]")) == "[1, 1, 2, 2]");
  // a user definition shadows the library one
  CHECK(eval_text("length xs = 42;\nlength []") == PlainTerm::integer(42));
}

TEST_CASE("declared datasets") {
  const Program p = parse("data sales;\ndata other;\nlength sales");
  CHECK(p.datasets() == std::vector<std::string>{"sales", "other"});
  const Dataset d{"data", PlainTerm::constr("Cons", {PlainTerm::integer(3), PlainTerm::constr("Nil")})};
  CHECK(eval_text("data data;\nhead data", {d}) == PlainTerm::integer(3));
}

TEST_CASE("operator names") {
  CHECK(operator_function("+") == "plus");
  CHECK(operator_function("<=") == "leq");
  CHECK(operator_function("++") == "concat");
  CHECK(operator_function("@").empty());
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "epslab/exprparse.hpp"
#include "expr_gen.hpp"

using namespace epslab;
using namespace epslab::expr;

TEST_CASE("basic evaluation") {
  CHECK(parse("1+y*y").eval({{"y", 2.0}}) == 5.0);
  CHECK(parse("-2^2").eval({}) == -4.0);
  CHECK(parse("2^3^2").eval({}) == 512.0);
  CHECK(parse("2^-1").eval({}) == 0.5);
  CHECK(parse("sin(pi/2)").eval({}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(parse("8/2/2").eval({}) == 2.0);
  CHECK(parse("1 - 2 - 3").eval({}) == -4.0);
  CHECK(parse("y*tau").eval({{"y", 3.0}, {"tau", 0.5}}) == 1.5);
  CHECK(parse("exp(1) - e").eval({}) == doctest::Approx(0.0));
  CHECK(parse("abs(-3) + sqrt(16) + cos(0)").eval({}) == 8.0);
  CHECK(parse("1.5e2 + .5").eval({}) == 150.5);
}

TEST_CASE("parse errors carry offset and expectations") {
  try {
    parse("1+");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
    CHECK(!e.expected().empty());
  }
  try {
    parse("(1+2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(e.expected() == std::vector<std::string>{")"});
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("sin 2"), ParseError);
  CHECK_THROWS_AS(parse("1 2"), ParseError);
  CHECK_THROWS_AS(parse("2e"), ParseError);
}

TEST_CASE("unknown and disallowed variables") {
  try {
    parse("1 + z");
    FAIL("expected UnknownVariable");
  } catch (const UnknownVariable& e) {
    CHECK(e.name() == "z");
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("t + y", {Var::y}), UnknownVariable);
  CHECK_NOTHROW(parse("y", {Var::y}));
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(parse("1/(y-1)").eval({{"y", 1.0}}), EvalError);
  CHECK_THROWS_AS(parse("sqrt(y)").eval({{"y", -1.0}}), EvalError);
  CHECK_THROWS_AS(parse("y + 1").eval({}), EvalError);
  CHECK_THROWS_AS(parse("exp(1000)").eval({}), EvalError);
  CHECK_THROWS_AS(parse("0^-1").eval({}), EvalError);
}

TEST_CASE("deep nesting is rejected, not a crash") {
  std::string s(5000, '(');
  s += "1";
  s += std::string(5000, ')');
  CHECK_THROWS_AS(parse(s), ParseError);
  CHECK_THROWS_AS(parse(std::string(5000, '-') + "1"), ParseError);
  CHECK(parse("((((1))))").eval({}) == 1.0);
}

TEST_CASE("pretty-print round trip on random trees") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    const Expr e = test_support::random_expr(rng, 5);
    const Expr back = parse(e.to_string());
    for (double y : {0.3, 1.7}) {
      const Bindings b{{"t", 0.25}, {"y", y}, {"tau", 0.6}, {"x", -1.1}};
      double a = 0.0, c = 0.0;
      bool ea = false, ec = false;
      try { a = e.eval(b); } catch (const EvalError&) { ea = true; }
      try { c = back.eval(b); } catch (const EvalError&) { ec = true; }
      CHECK(ea == ec);
      if (!ea && !ec) CHECK(a == c);
    }
  }
}

TEST_CASE("fuzzed input never escapes the typed errors") {
  std::mt19937_64 rng(9);
  int parsed = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::string s = test_support::fuzz_string(rng);
    try {
      const Expr e = parse(s);
      ++parsed;
      try { (void)e.eval({{"t", 0.1}, {"y", 0.2}, {"tau", 0.3}, {"x", 0.4}}); } catch (const EvalError&) {}
    } catch (const ParseError&) {
    } catch (const UnknownVariable&) {
    }
  }
  CHECK(parsed > 0);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "bdstab/errors.hpp"
#include "bdstab/rate_dsl.hpp"

using namespace bdstab;

TEST_SUITE("rate_dsl") {

TEST_CASE("shannon rate shape parses and evaluates at an axis point") {
  const auto e = parse("log(1 + (x1/norm)/(0.1 + x2/norm))");
  CHECK(e.max_variable() == 2);
  const double x[] = {1.0, 0.0};
  CHECK(e.evaluate(x) == doctest::Approx(std::log(11.0)).epsilon(1e-15));
  CHECK(e.evaluate(x) == doctest::Approx(2.397895).epsilon(1e-6));
}

TEST_CASE("incomplete expression reports its column") {
  try {
    parse("x1 + ");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 1);
    CHECK(err.column() == 6);
  }
}

TEST_CASE("sum of squared direction cosines is one on the sphere") {
  const auto e = parse("pow(x1/norm, 2) + pow(x2/norm, 2)");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double x[] = {u(rng), u(rng)};
    CHECK(e.evaluate(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("direction cosine at (3,4)") {
  const double x[] = {3.0, 4.0};
  CHECK(parse("x1/norm").evaluate(x) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
  const double x[] = {2.0, 3.0};
  CHECK(parse("1 - 2 - 3").evaluate(x) == -4.0);
  CHECK(parse("8 / 4 / 2").evaluate(x) == 1.0);
  CHECK(parse("1 + 2 * 3").evaluate(x) == 7.0);
  CHECK(parse("-x1 * x2").evaluate(x) == -6.0);
  CHECK(parse("--x1").evaluate(x) == 2.0);
  CHECK(parse(" min( x1 ,x2 )\n+ max(x1, x2)").evaluate(x) == 5.0);
  CHECK(parse("exp(0) + sqrt(16) + 1.5e1").evaluate(x) == 20.0);
  CHECK(parse(".5 + 2.").evaluate(x) == 2.5);
}

TEST_CASE("syntax errors carry positions") {
  auto column_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.column();
    }
    return std::size_t{0};
  };
  CHECK(column_of("") == 1);
  CHECK(column_of("(x1 + 1") == 8);
  CHECK(column_of("x1 + y") == 6);
  CHECK(column_of("x0") == 1);
  CHECK(column_of("log(x1, x2)") > 0);
  CHECK(column_of("pow(x1)") > 0);
  CHECK(column_of("x1 $ 2") == 4);
  CHECK(column_of("x1 x2") == 4);
  CHECK_THROWS_AS(parse(std::string(70000, '1')), ParseError);
  try {
    parse("1 +\n  foo");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("domain violations raise instead of producing NaN") {
  const double x[] = {1.0, 2.0};
  CHECK_THROWS_AS(parse("log(x1 - x2)").evaluate(x), EvalError);
  CHECK_THROWS_AS(parse("sqrt(x1 - x2)").evaluate(x), EvalError);
  CHECK_THROWS_AS(parse("x1 / (x2 - 2)").evaluate(x), EvalError);
  CHECK_THROWS_AS(parse("exp(1000)").evaluate(x), EvalError);
  try {
    parse("1 + log(x1 - x2)").evaluate(x);
  } catch (const EvalError& e) {
    CHECK(e.subexpression() == "log(x1 - x2)");
  }
}

TEST_CASE("variables beyond the state dimension are rejected at evaluation") {
  const double x[] = {1.0, 2.0};
  CHECK_THROWS_AS(parse("x3").evaluate(x), EvalError);
}

TEST_CASE("print then parse reproduces the tree") {
  const char* cases[] = {"log(1 + (x1/norm)/(0.1 + x2/norm))",
                         "x1 - (x2 - x1)",
                         "(x1 / x2) / norm",
                         "x1 / (x2 / norm)",
                         "-(x1 + x2) * 2",
                         "pow(-x1, 2) - -3",
                         "max(min(x1, x2), 0.25) * exp(-x2/norm)",
                         "1e-300 + 0.1 + 123456789.125"};
  for (const char* text : cases) {
    const auto a = parse(text);
    const auto b = parse(a.print());
    CHECK_MESSAGE(a == b, text);
    CHECK(b.print() == a.print());
    const double x[] = {0.7, 1.3};
    CHECK(a.evaluate(x) == b.evaluate(x));
  }
}

}

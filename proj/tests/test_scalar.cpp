#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gric/errors.hpp"
#include "gric/jet.hpp"

#include "test_util.hpp"

using namespace gric;
using gric_test::random_expression;
using gric_test::uniform;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("parser produces the expected trees") {
  Expression e = parse_expression("x1^2 + 3*x2", 2);
  const auto* root = e.root();
  REQUIRE(root != nullptr);
  CHECK(root->kind == Expression::Kind::Add);
  CHECK(root->a->kind == Expression::Kind::Pow);
  CHECK(root->a->a->kind == Expression::Kind::Variable);
  CHECK(root->a->a->index == 0);
  CHECK(root->a->index == 2);
  CHECK(root->b->kind == Expression::Kind::Mul);
  CHECK(root->b->a->kind == Expression::Kind::Constant);
  CHECK(root->b->a->value == 3.0);
  CHECK(root->b->b->kind == Expression::Kind::Variable);
  CHECK(root->b->b->index == 1);

  Expression s = parse_expression("sqrt(1+x1)", 1);
  CHECK(s.root()->kind == Expression::Kind::Sqrt);
  CHECK(s.root()->a->kind == Expression::Kind::Add);
  CHECK(s.root()->a->a->value == 1.0);
  CHECK(s.root()->a->b->index == 0);
}

TEST_CASE("parser failures carry positions and expected sets") {
  CHECK_THROWS_AS(parse_expression("x1 +", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(x1", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("1 + * 2", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("x3", 2), VariableOutOfRange);
  try {
    parse_expression("x1 +", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
    CHECK(!e.expected.empty());
  }
}

TEST_CASE("rational literals evaluate in floating point") {
  Expression e = parse_expression("3/4 + 1/8", 0);
  CHECK(e.eval({}) == doctest::Approx(0.875).epsilon(1e-15));
  Jet j = evaluate_jet(e, {}, 2);
  CHECK(j.value() == doctest::Approx(0.875).epsilon(1e-15));
}

TEST_CASE("printer output re-parses to the identical tree") {
  const char* sources[] = {
      "x1^2 + 3*x2", "sqrt(1+x1)", "-x1*sin(x2)", "exp(x1/4)-cos(x2)^3",
      "(x1+x2)*(x1-x2)", "1/2 + x1^5",
  };
  for (const char* src : sources) {
    Expression e = parse_expression(src, 2);
    Expression back = parse_expression(e.print(), 2);
    CHECK(back.same_tree(e));
  }
  for (int it = 0; it < 50; ++it) {
    Expression e = parse_expression(random_expression(3, 3), 3);
    CHECK(parse_expression(e.print(), 3).same_tree(e));
  }
}

TEST_CASE("product jet at a point") {
  Jet j = evaluate_jet(parse_expression("x1*x2", 2), {2, 3}, 2);
  CHECK(j.value() == 6.0);
  CHECK(j.partial({1, 0}) == 3.0);
  CHECK(j.partial({0, 1}) == 2.0);
  CHECK(j.partial({1, 1}) == 1.0);
  CHECK(j.partial({2, 0}) == 0.0);
  CHECK(j.partial({0, 2}) == 0.0);
  CHECK(j.budget() == 2);
}

TEST_CASE("sqrt jet at a point") {
  Jet j = evaluate_jet(parse_expression("sqrt(x1)", 1), {4}, 1);
  CHECK(j.value() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(j.partial({1}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("finite differences recover closed-form derivatives") {
  Jet c = finite_difference_jet(parse_expression("x1^3", 1), {1}, 1, 1e-4);
  CHECK(close(c.partial({1}), 3.0, 1e-6));

  Jet k = finite_difference_jet(parse_expression("5", 1), {0.7}, 2);
  CHECK(k.value() == 5.0);
  CHECK(k.partial({1}) == 0.0);
  CHECK(k.partial({2}) == 0.0);

  Jet e = finite_difference_jet(parse_expression("exp(x1)", 1), {0}, 2);
  CHECK(e.value() == 1.0);
  CHECK(close(e.partial({1}), 1.0, 1e-5));
  CHECK(close(e.partial({2}), 1.0, 1e-5));
}

TEST_CASE("jets match the finite-difference oracle on random expressions") {
  for (int it = 0; it < 120; ++it) {
    int n = gric_test::uniform_int(1, 3);
    std::vector<double> x0;
    for (int i = 0; i < n; ++i) x0.push_back(uniform(0.3, 1.4));
    Expression e = parse_expression(random_expression(n, 3), n);
    Jet a = evaluate_jet(e, x0, 2);
    Jet b = finite_difference_jet(e, x0, 2);
    for (int k = 0; k < a.layout()->size(); ++k) {
      const auto& m = a.layout()->exponent(k);
      CHECK(rel_close(a.partial(m), b.partial(m), 1e-5));
    }
  }
}

TEST_CASE("jet ring laws hold exactly on stored coefficients") {
  auto layout = JetLayout::get(2, 3);
  for (int it = 0; it < 40; ++it) {
    std::vector<double> x0{uniform(0.3, 1.0), uniform(0.3, 1.0)};
    auto rand_jet = [&] {
      std::vector<double> c;
      for (int k = 0; k < layout->size(); ++k) c.push_back(uniform(-2, 2));
      return Jet(layout, x0, c, 3);
    };
    Jet a = rand_jet(), b = rand_jet(), c = rand_jet();
    CHECK(((a + b) + c - (a + (b + c))).max_abs_coeff() <= 1e-14);
    CHECK((a * b - b * a).max_abs_coeff() <=
          1e-14 * std::max(1.0, (a * b).max_abs_coeff()));
    Jet lhs = a * (b + c), rhs = a * b + a * c;
    double dev = (lhs - rhs).max_abs_coeff();
    CHECK(dev <= 1e-12 * std::max(1.0, lhs.max_abs_coeff()));
  }
}

TEST_CASE("sqrt squares back to the argument") {
  auto layout = JetLayout::get(2, 3);
  for (int it = 0; it < 20; ++it) {
    std::vector<double> c;
    c.push_back(uniform(0.5, 3.0));
    for (int k = 1; k < layout->size(); ++k) c.push_back(uniform(-1, 1));
    Jet j(layout, {0.5, 0.5}, c, 3);
    Jet r = j.sqrt();
    CHECK((r * r - j).max_abs_coeff() <= 1e-12 * std::max(1.0, j.max_abs_coeff()));
    CHECK((j.reciprocal() * j - Jet::constant(layout, {0.5, 0.5}, 1.0)).max_abs_coeff() <= 1e-12);
  }
}

TEST_CASE("mixed partial derivatives commute") {
  Expression e = parse_expression("sin(x1*x2)+exp(x1/3)*x2^2", 2);
  Jet j = evaluate_jet(e, {0.4, 0.9}, 3);
  Jet d12 = j.partial_derivative(0).partial_derivative(1);
  Jet d21 = j.partial_derivative(1).partial_derivative(0);
  CHECK((d12 - d21).max_abs_coeff() <= 1e-12 * std::max(1.0, d12.max_abs_coeff()));
}

TEST_CASE("differentiability budget decrements and errors on exhaustion") {
  Jet j = evaluate_jet(parse_expression("x1^4", 1), {1.5}, 2);
  CHECK(j.budget() == 2);
  Jet d = j.partial_derivative(0);
  CHECK(d.budget() == 1);
  Jet dd = d.partial_derivative(0);
  CHECK(dd.budget() == 0);
  CHECK_THROWS_AS(dd.partial_derivative(0), JetOrderExhausted);
}

TEST_CASE("domain errors surface as typed exceptions") {
  CHECK_THROWS_AS(evaluate_jet(parse_expression("1/x1", 1), {0}, 2),
                  DivisionByZeroConstantTerm);
  CHECK_THROWS_AS(evaluate_jet(parse_expression("sqrt(x1-2)", 1), {1}, 2),
                  SqrtOfNonpositive);
}

TEST_CASE("coefficient count matches the layout dimension") {
  auto layout = JetLayout::get(3, 2);
  // C(3+2,2) = 10 multi-indices
  CHECK(layout->size() == 10);
  Jet j = evaluate_jet(parse_expression("x1+x2*x3", 3), {1, 2, 3}, 2);
  CHECK(static_cast<int>(j.coeffs().size()) == 10);
}

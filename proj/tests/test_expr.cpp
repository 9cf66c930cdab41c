#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

using namespace finsler;

namespace {

double ev(const std::string& s, std::vector<double> x = {}, std::vector<double> y = {}) {
  return evaluate<double>(parse(s), x, y);
}

}  // namespace

TEST(Expr, Precedence) {
  EXPECT_DOUBLE_EQ(ev("1 + 2*3"), 7.0);
  EXPECT_DOUBLE_EQ(ev("(1 + 2)*3"), 9.0);
  EXPECT_DOUBLE_EQ(ev("2^3^2"), 512.0);  // right associative
  EXPECT_DOUBLE_EQ(ev("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(ev("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(ev("1 - 2 - 3"), -4.0);
  EXPECT_DOUBLE_EQ(ev("2*-3"), -6.0);
}

TEST(Expr, NumbersAndFunctions) {
  EXPECT_DOUBLE_EQ(ev("1.5e2"), 150.0);
  EXPECT_DOUBLE_EQ(ev(".25"), 0.25);
  EXPECT_NEAR(ev("sqrt(2)*sqrt(2)"), 2.0, 1e-15);
  EXPECT_NEAR(ev("ln(exp(0.3))"), 0.3, 1e-15);
  EXPECT_NEAR(ev("sin(0.2)^2 + cos(0.2)^2"), 1.0, 1e-15);
}

TEST(Expr, Variables) {
  EXPECT_DOUBLE_EQ(ev("x1*y2 - x2*y1", {1.0, 2.0}, {3.0, 4.0}), -2.0);
  EXPECT_THROW(ev("x3", {1.0, 2.0}), UnboundVariable);
  EXPECT_EQ(max_variable_index(parse("x1 + y3"), VarKind::Y), 2);
  EXPECT_TRUE(is_constant(parse("2*sqrt(3)")));
  EXPECT_FALSE(is_constant(parse("x1")));
}

TEST(Expr, ParseErrors) {
  for (const char* bad : {"", "1 +", "(1", "foo(2)", "sqrt 2", "1 $ 2", "x1 y1", "2..3"})
    EXPECT_THROW(parse(bad), ParseError) << bad;
}

TEST(Expr, DomainErrorsAreSingular) {
  EXPECT_THROW(ev("sqrt(0 - 1)"), SingularEvaluation);
  EXPECT_THROW(ev("ln(0)"), SingularEvaluation);
  EXPECT_THROW(ev("1/(x1 - x1)", {0.5}), SingularEvaluation);
}

TEST(Expr, PrintRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (const char* s : {"x1^2 + 2*x1*y2 - (y1 - y2)^3", "sqrt(1 + x1^2)/(2 - x2)", "-(x1 - y1)^2",
                        "exp(-x1)*cos(x2 + y1)", "2^-x1", "(x1/x2)/y1", "x1 - (x2 - y1)"}) {
    const Expr e = parse(s);
    const Expr back = parse(to_string(e));
    for (int k = 0; k < 5; ++k) {
      std::vector<double> x = {u(rng), 0.5 + u(rng)}, y = {0.7 + u(rng), u(rng)};
      EXPECT_NEAR(evaluate<double>(back, x, y), evaluate<double>(e, x, y), 1e-13) << s << " -> " << to_string(e);
    }
  }
}

TEST(Expr, JetEvaluationMatchesDoubles) {
  const Expr e = parse("x1^2*sqrt(y1^2 + y2^2) + exp(x2)*y1");
  std::vector<double> xv = {0.3, -0.2}, yv = {1.0, 0.5};
  std::vector<MultiJet> x, y;
  for (int i = 0; i < 2; ++i) x.push_back(MultiJet::variable(4, 2, i, xv[i]));
  for (int i = 0; i < 2; ++i) y.push_back(MultiJet::variable(4, 2, 2 + i, yv[i]));
  MultiJet j = evaluate<MultiJet>(e, x, y);
  EXPECT_NEAR(j.value(), evaluate<double>(e, xv, yv), 1e-15);
  // d/dx1 = 2 x1 |y|
  EXPECT_NEAR(extract_derivative(j, make_index({1, 0, 0, 0})), 2 * 0.3 * std::sqrt(1.25), 1e-14);
}

#include <catch_amalgamated.hpp>

#include "lightrays/expression.hpp"

using lightrays::Expression;
using Catch::Matchers::WithinAbs;

namespace {
Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}
}  // namespace

TEST_CASE("expression grammar evaluates constants, sums, products, sine and coordinates") {
  CHECK_THAT(Expression::parse("0.5")(pt({1, 2})), WithinAbs(0.5, 0));
  CHECK_THAT(Expression::parse("x1")(pt({1, 2})), WithinAbs(2.0, 0));
  CHECK_THAT(Expression::parse("0.2*sin(x1)")(pt({0, 0.3})), WithinAbs(0.2 * std::sin(0.3), 1e-16));
  CHECK_THAT(Expression::parse("1 + 2*x0*x1")(pt({2, 3})), WithinAbs(13.0, 0));
  CHECK_THAT(Expression::parse("x0 - x1")(pt({2, 3})), WithinAbs(-1.0, 0));
  CHECK_THAT(Expression::parse("-sin(x0)")(pt({0.4})), WithinAbs(-std::sin(0.4), 1e-16));
  CHECK_THAT(Expression::parse("2*(x0 + 1)")(pt({0.5})), WithinAbs(3.0, 0));
}

TEST_CASE("analytic gradient matches central differences") {
  const Expression e = Expression::parse("0.2*sin(x1) + 0.1*sin(x0 + 2*x2)*x1 + 0.3*x2");
  const Eigen::VectorXd x = pt({0.3, -0.7, 0.4});
  const Eigen::VectorXd g = e.gradient(x);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK_THAT(g[i], WithinAbs((e(xp) - e(xm)) / (2 * h), 1e-9));
  }
}

TEST_CASE("coordinate bookkeeping and printing") {
  CHECK(Expression::parse("0.3").is_constant());
  CHECK(Expression::parse("sin(x3)").max_coordinate() == 3);
  const Expression e = Expression::parse("0.25*sin(x1) + 0.1*x0");
  const Expression again = Expression::parse(e.to_string());
  const Eigen::VectorXd x = pt({0.7, -0.2});
  CHECK(again(x) == e(x));
  const Expression sum = Expression::constant(1.0) + Expression::coordinate(0) * Expression::constant(2.0);
  CHECK(sum(pt({3.0})) == 7.0);
}

TEST_CASE("malformed expressions raise ParseError with a column") {
  for (const char* bad : {"", "sin x1", "0.2*", "x", "(x0", "cos(x0)", "x0 x1"}) {
    INFO(bad);
    CHECK_THROWS_AS(Expression::parse(bad), lightrays::ParseError);
  }
  try {
    Expression::parse("0.2*?");
  } catch (const lightrays::ParseError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

#include <catch_amalgamated.hpp>

#include "lightrays/fixtures.hpp"
#include "lightrays/oracles.hpp"

using namespace lightrays;
using Catch::Matchers::WithinAbs;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}
}  // namespace

TEST_CASE("eval_metric on the flat catalog") {
  CHECK((eval_metric(minkowski(3), vec({0, 0, 0})) - minkowski_eta(3)).norm() == 0.0);
  const auto zero = conformal_flat(4, Expression::constant(0.0));
  CHECK((eval_metric(zero, vec({0.3, -1, 2, 0.1})) - minkowski_eta(4)).norm() == 0.0);
  const auto lin = conformal_flat(3, Expression::parse("0.1*x1"));
  CHECK((eval_metric(lin, vec({0.5, 0, 0.2})) - minkowski_eta(3)).norm() == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(eval_metric(minkowski(3), vec({6, 0, 0})), OutOfDomain);
  const auto punct = punctured_minkowski2();
  CHECK_THROWS_AS(eval_metric(punct, vec({1, 1})), OutOfDomain);
  CHECK_THROWS_AS(eval_metric(punct, vec({1, 1 + 5e-10})), OutOfDomain);
  CHECK_NOTHROW(eval_metric(punct, vec({1, 1 + 1e-8})));
  const auto ball = minkowski_ball3();
  CHECK_THROWS_AS(eval_metric(ball, vec({0.7, 0.7, 0.3})), OutOfDomain);
  CHECK_NOTHROW(eval_metric(ball, vec({0.5, 0.5, 0.1})));
  CHECK_THROWS_AS(conformal_flat(3, Expression::parse("sin(x3)")), ModelError);
  ModelData d = flat_model_data(2, 1.0);
  d.excluded_points.push_back(vec({3, 0}));
  CHECK_THROWS_AS(SpacetimeModel(d), ModelError);
}

TEST_CASE("signature violations are model errors") {
  ModelData d = flat_model_data(3, 1.0);
  d.metric.base = [](const Vec&) { return Mat::Identity(3, 3); };
  CHECK_THROWS_AS(eval_metric(SpacetimeModel(d), vec({0, 0, 0})), ModelError);
  d.metric.base = [](const Vec&) {
    Mat g = minkowski_eta(3);
    g(0, 1) = 0.5;
    return g;
  };
  CHECK_THROWS_AS(eval_metric(SpacetimeModel(d), vec({0, 0, 0})), ModelError);
}

TEST_CASE("christoffel: flat zero, conformal formula against independent oracle and FD path") {
  CHECK(christoffel(minkowski(4), vec({0.1, 0.2, 0.3, 0.4})).max_abs() == 0.0);

  // Linear sigma in m = 2: constant gradient.
  const auto lin = conformal_flat(2, Expression::parse("0.3*x0 + 0.2*x1"));
  const Vec x = vec({0.4, -0.3});
  Christoffel diff = christoffel(lin, x);
  diff -= oracle::conformal_christoffel(2, vec({0.3, 0.2}), 0.3 * 0.4 + 0.2 * -0.3);
  CHECK(diff.max_abs() < 1e-12);
  CHECK((christoffel(lin, x) - lin.christoffel_fd(x, 1e-5)).max_abs() < 1e-6);

  const auto sine = conformal_flat(3, Expression::parse("0.2*sin(x2)"));
  const CounterRng rng(3, "christoffel");
  auto st = rng.stream();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec p = st.uniform_vec(3, -2, 2);
    const Christoffel G = christoffel(sine, p);
    worst = std::max(worst, (G - sine.christoffel_fd(p, 1e-5)).max_abs());
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(G(a, i, j) == G(a, j, i));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("riemann_op: flat and constant factor vanish, curved matches the full tensor") {
  const CounterRng rng(5, "riemann");
  auto st = rng.stream();
  const auto c = conformal_flat(3, Expression::parse("0.4"));
  for (int k = 0; k < 10; ++k) {
    const Vec p = st.uniform_vec(3, -1, 1), J = st.normal_vec(3), v = st.normal_vec(3);
    CHECK(riemann_op(minkowski(3), p, J, v).norm() == 0.0);
    CHECK(riemann_op(c, p, J, v).norm() <= 1e-9);
  }
  const auto curved = fixtures::conf(3).model;
  for (int k = 0; k < 10; ++k) {
    const Vec p = st.uniform_vec(3, -1, 1), J = st.normal_vec(3), v = st.normal_vec(3);
    const oracle::RiemannTensor R(curved, p);
    CHECK((riemann_op(curved, p, J, v) - R.apply(J, v, v)).norm() <= 1e-6);
    CHECK((R.apply(J, v, v) + R.apply(v, J, v)).norm() <= 1e-12);
    CHECK((riemann_matrix_raw(curved, p, v) * J - riemann_op(curved, p, J, v)).norm() <= 1e-8);
  }
}

TEST_CASE("conformal_rescale: identity, additivity, null cone and installed symbols") {
  const auto mink = minkowski(3);
  const auto same = conformal_rescale(mink, ScalarField::zero());
  const auto s1 = ScalarField::from_expression(Expression::parse("0.1*sin(x1)"));
  const auto s2 = ScalarField::from_expression(Expression::parse("0.2*x2 + 0.05*x0"));
  const auto twice = conformal_rescale(conformal_rescale(mink, s1), s2);
  const auto once = conformal_rescale(mink, s1 + s2);
  const CounterRng rng(9, "rescale");
  auto st = rng.stream();
  for (int k = 0; k < 10; ++k) {
    const Vec p = st.uniform_vec(3, -2, 2);
    CHECK((eval_metric(same, p) - eval_metric(mink, p)).norm() == 0.0);
    CHECK((eval_metric(twice, p) - eval_metric(once, p)).cwiseAbs().maxCoeff() <= 1e-12);
    const Vec v = make_null(mink, p, st.normal_vec(2));
    const double factor = std::exp(2.0 * (s1.value(p) + s2.value(p)));
    CHECK(std::abs(inner(eval_metric(once, p), v, v)) <= 1e-10 * factor);
    CHECK((timelike_field(once, p) - timelike_field(mink, p)).norm() == 0.0);
  }
  CHECK(static_cast<bool>(once.metric().christoffel));
  const auto curved_base = conformal_rescale(once, s1);
  CHECK(static_cast<bool>(curved_base.metric().christoffel));  // base still flat
  ModelData d = flat_model_data(3, 2.0);
  d.metric.flat_base = false;
  CHECK_FALSE(static_cast<bool>(conformal_rescale(SpacetimeModel(d), s1).metric().christoffel));
}

TEST_CASE("lower and raise index") {
  const auto mink = minkowski(3);
  CHECK((lower_index(mink, vec({0, 0, 0}), vec({1, 1, 0})) - vec({-1, 1, 0})).norm() == 0.0);
  const auto c = fixtures::conf(3).model;
  const CounterRng rng(1, "lower");
  auto st = rng.stream();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vec p = st.uniform_vec(3, -2, 2), v = st.normal_vec(3);
    worst = std::max(worst, (raise_index(c, p, lower_index(c, p, v)) - v).norm());
    const double e2s = std::exp(2.0 * c.metric().sigma.value(p));
    CHECK((lower_index(c, p, v) - e2s * lower_index(mink, p, v)).norm() <= 1e-12 * e2s * v.norm());
  }
  CHECK(worst <= 1e-12);
}

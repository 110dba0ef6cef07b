#include <catch_amalgamated.hpp>

#include <sstream>

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

TEST_CASE("spray_rhs") {
  const auto s = spray_rhs(minkowski(3), {vec({0, 0, 0}), vec({1, 1, 0})});
  CHECK((s.dx - vec({1, 1, 0})).norm() == 0.0);
  CHECK(s.dv.norm() == 0.0);
  CHECK(spray_rhs(conformal_flat(3, Expression::constant(0.2)), {vec({0, 0, 0}), vec({1, 0, 1})}).dv.norm() == 0.0);
  const auto c = fixtures::conf(3).model;
  const CounterRng rng(1, "spray");
  auto st = rng.stream();
  for (int k = 0; k < 20; ++k) {
    const Vec x = st.uniform_vec(3, -1, 1), v = st.normal_vec(3);
    const Christoffel G = christoffel(c, x);
    Vec expected = Vec::Zero(3);
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) expected[a] -= G(a, i, j) * v[i] * v[j];
    CHECK((spray_rhs(c, {x, v}).dv - expected).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(spray_rhs(c, {vec({9, 0, 0}), vec({1, 1, 0})}), OutOfDomain);
}

TEST_CASE("flat null geodesics are straight lines") {
  const auto g = integrate_geodesic(minkowski(3), vec({0, 0, 0}), vec({1, 1, 0}), {0.0, 1.0}, 800);
  CHECK((g.nodes.back().x - vec({1, 1, 0})).norm() <= 1e-12);
  for (const auto& n : g.nodes) CHECK((n.x - n.t * vec({1, 1, 0})).norm() <= 1e-12);
  CHECK(g.forward.reason == Termination::IntervalEnd);
  CHECK(g.nodes.size() == 801);
}

TEST_CASE("integrate_geodesic input validation") {
  const auto m = minkowski(3);
  CHECK_THROWS_AS(integrate_geodesic(m, vec({0, 0, 0}), vec({1, 0.5, 0}), {0, 1}, 100), NotNull);
  CHECK_THROWS_AS(integrate_geodesic(m, vec({0, 0, 0}), vec({-1, 1, 0}), {0, 1}, 100), NotFuture);
  CHECK_THROWS_AS(integrate_geodesic(m, vec({7, 0, 0}), vec({1, 1, 0}), {0, 1}, 100), OutOfDomain);
  CHECK_THROWS_AS(integrate_geodesic(m, vec({0, 0, 0}), vec({1, 1, 0}), {0, 1}, 8), std::invalid_argument);
}

TEST_CASE("punctured plane: nearby ray passes, the ray through the puncture stops") {
  const auto p = punctured_minkowski2();
  const auto pass = integrate_geodesic(p, vec({0, 1e-3}), vec({1, 1}), {0.0, 2.0}, 1600);
  CHECK(pass.forward.reason == Termination::IntervalEnd);
  CHECK_THAT(pass.nodes.back().t, WithinAbs(2.0, 1e-12));
  const auto hit = integrate_geodesic(p, vec({0, 0}), vec({1, 1}), {0.0, 2.0}, 1600);
  CHECK(hit.forward.reason == Termination::ExclusionHit);
  CHECK_THAT(hit.forward.parameter, WithinAbs(1.0, 1e-6));
  CHECK(hit.nodes.back().t < 1.0);
}

TEST_CASE("domain exit terminates early") {
  const auto g = integrate_geodesic(minkowski(3, 1.0), vec({0, 0, 0}), vec({1, 1, 0}), {0.0, 3.0}, 300);
  CHECK(g.forward.reason == Termination::DomainExit);
  CHECK(g.nodes.back().t <= 1.0);
  const auto ball = minkowski_ball3();
  const auto b = integrate_geodesic(ball, vec({0, 0, 0}), vec({1, 0, 1}), {0.0, 2.0}, 400);
  CHECK(b.forward.reason == Termination::DomainExit);
  CHECK(b.nodes.back().x.squaredNorm() < 1.0);
}

TEST_CASE("exp_map") {
  const auto m = minkowski(4);
  const Vec p = vec({0.1, 0.2, -0.3, 0.4}), w = vec({1, 0, 0.6, 0.8});
  CHECK((exp_map(m, p, w, 0.7) - (p + 0.7 * w)).norm() <= 1e-12);
  const auto c = fixtures::conf(3).model;
  const Vec pc = vec({0, 0.1, 0.2});
  CHECK(exp_map(c, pc, make_null(c, pc, vec({1, 0})), 0.0) == pc);
  // Self-convergence on the curved model.
  const Vec u = make_null(c, pc, vec({0.6, 0.8}));
  auto at = [&](int n) { return integrate_geodesic(c, pc, u, {0.0, 1.5}, n).nodes.back().x; };
  const Vec x1 = at(200), x2 = at(400), x3 = at(800);
  CHECK(std::log2((x1 - x2).norm() / (x2 - x3).norm()) >= 3.9);
  CHECK_THROWS_AS(exp_map(minkowski(3, 1.0), vec({0, 0, 0}), vec({1, 1, 0}), 2.0), OutOfDomain);
}

TEST_CASE("make_null") {
  const auto m = minkowski(3);
  CHECK((make_null(m, vec({0, 0, 0}), vec({1, 0})) - vec({1, 1, 0})).norm() <= 1e-15);
  CHECK((make_null(m, vec({0, 0, 0}), vec({0, 1})) - vec({1, 0, 1})).norm() <= 1e-15);
  const CounterRng rng(2, "make_null");
  auto st = rng.stream();
  for (const auto& fx : fixtures::standard()) {
    const int d = fx.model.dim();
    for (int k = 0; k < 50; ++k) {
      const Vec p = st.uniform_vec(d, -2, 2);
      const Vec v = make_null(fx.model, p, st.normal_vec(d - 1));
      const Mat g = eval_metric(fx.model, p);
      CHECK(std::abs(inner(g, v, v)) <= 1e-10);
      CHECK(std::abs(inner(g, v, timelike_field(fx.model, p)) + 1.0) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(make_null(m, vec({0, 0, 0}), vec({0, 0})), std::invalid_argument);
}

TEST_CASE("null drift and affine rescaling") {
  const auto fx = fixtures::conf(4);
  const CounterRng rng(4, "drift");
  auto st = rng.stream();
  for (int k = 0; k < 5; ++k) {
    const LightRay r = fixtures::random_ray(fx, st);
    const NullGeodesic g = integrate_ray(fx.model, r.event(), r.v, -1.0, 1.0);
    CHECK(null_drift(g) <= 1e-8);
    for (double lambda : {0.5, 2.0}) {
      const auto a = integrate_geodesic(fx.model, r.event(), r.v, {0.0, 1.0}, 400);
      const auto b = integrate_geodesic(fx.model, r.event(), lambda * r.v, {0.0, 1.0 / lambda}, 400);
      for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK((a.nodes[i].x - b.nodes[i].x).norm() <= 1e-9);
        CHECK((lambda * a.nodes[i].v - b.nodes[i].v).norm() <= 1e-9);
      }
    }
  }
}

TEST_CASE("two-sided integration and dense output") {
  const auto fx = fixtures::conf(3);
  const CounterRng rng(6, "dense");
  auto st = rng.stream();
  const LightRay r = fixtures::random_ray(fx, st);
  const NullGeodesic g = integrate_ray(fx.model, r.event(), r.v, -0.5, 0.75);
  CHECK(g.base().t == 0.0);
  CHECK((g.base().x - r.event()).norm() == 0.0);
  CHECK_THAT(g.t_min(), WithinAbs(-0.5, 1e-12));
  CHECK_THAT(g.t_max(), WithinAbs(0.75, 1e-12));
  // Interpolant between nodes matches a direct integration to that parameter.
  const double t = 0.3 + 0.4 / 800.0;
  const Vec direct = exp_map(fx.model, r.event(), r.v, t, 4000);
  CHECK((g.state_at(t).x - direct).norm() <= 1e-11);
  const NullGeodesic single = integrate_ray(fx.model, r.event(), r.v, 0.0, 0.0);
  CHECK(single.nodes.size() == 1);
}

TEST_CASE("reparametrize_to_geodesic: closed forms") {
  const auto m = minkowski(3);
  const Vec p = vec({0, 0.2, -0.1}), v = vec({1, 0.6, 0.8});
  for (double c : {0.0, 1.0, 0.5}) {
    Pregeodesic pre;
    const int n = 801;
    for (int i = 0; i < n; ++i) {
      const double u = 1.2 * i / (n - 1);
      const double h = oracle::h_inverse_constant(c, u);
      pre.t.push_back(u);
      pre.x.push_back(p + h * v);
      pre.xdot.push_back(std::exp(c * u) * v);
      pre.f.push_back(c);
    }
    const Reparametrization r = reparametrize_to_geodesic(m, pre);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(r.h_inverse[static_cast<std::size_t>(i)] - oracle::h_inverse_constant(c, pre.t[static_cast<std::size_t>(i)])));
    INFO("c = " << c);
    CHECK(err <= 1e-8);
    for (const auto& node : r.geodesic.nodes) CHECK((node.x - (p + node.t * v)).norm() <= 1e-8);
    CHECK(geodesic_residual(m, r.geodesic.nodes) <= 1e-6);
    if (c == 1.0) CHECK(geodesic_residual(m, std::span<const GeodesicNode>(
                            std::vector<GeodesicNode>{{0.0, p, v}, {0.1, p, std::exp(0.1) * v}, {0.2, p, std::exp(0.2) * v},
                                                      {0.3, p, std::exp(0.3) * v}, {0.4, p, std::exp(0.4) * v}})) >= 1e-2);
  }
}

TEST_CASE("reparametrize_to_geodesic: a geodesic of g is a pregeodesic of a conformal metric") {
  const auto fx = fixtures::conf(3);
  const auto bar = conformal_rescale(fx.model, ScalarField::from_expression(fixtures::sigma_bar(3)));
  const CounterRng rng(8, "pregeo");
  auto st = rng.stream();
  const LightRay r = fixtures::random_ray(fx, st);
  const NullGeodesic g = integrate_geodesic(fx.model, r.event(), r.v, {0.0, 1.0}, 800);
  Pregeodesic pre;
  const ScalarField s = ScalarField::from_expression(fixtures::sigma_bar(3));
  for (const auto& n : g.nodes) {
    pre.t.push_back(n.t);
    pre.x.push_back(n.x);
    pre.xdot.push_back(n.v);
    pre.f.push_back(2.0 * s.gradient(n.x).dot(n.v));
  }
  const Reparametrization rep = reparametrize_to_geodesic(bar, pre);
  CHECK(geodesic_residual(bar, rep.geodesic.nodes) <= 1e-6);
  // Direct integration in the rescaled metric from the same initial state.
  const double tau = rep.geodesic.nodes.back().t;
  const Vec direct = exp_map(bar, r.event(), r.v, tau, 1600);
  CHECK((rep.geodesic.nodes.back().x - direct).norm() <= 1e-8);
  pre.f.assign(pre.f.size(), 0.0);
  CHECK_THROWS_AS(reparametrize_to_geodesic(bar, pre), NotPregeodesic);
}

TEST_CASE("geodesic CSV") {
  const auto g = integrate_geodesic(minkowski(2), vec({0, 0}), vec({1, 1}), {0.0, 1.0}, 16);
  std::ostringstream os;
  write_geodesic_csv(os, g);
  const std::string s = os.str();
  CHECK(s.rfind("t,x0,x1,v0,v1\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 18);
}

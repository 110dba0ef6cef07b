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

std::shared_ptr<const NullGeodesic> flat_line(double t0 = -1.0, double t1 = 1.0) {
  return std::make_shared<const NullGeodesic>(integrate_ray(minkowski(3), vec({0, 0, 0}), vec({1, 1, 0}), t0, t1));
}
}  // namespace

TEST_CASE("flat Jacobi fields are affine in t") {
  const auto geo = flat_line();
  const JacobiField J = integrate_jacobi(geo, {vec({0, 0, 1}), vec({0, 0, 2})});
  for (const auto& s : J.samples) {
    CHECK((s.J - vec({0, 0, 1 + 2 * s.t})).norm() <= 1e-12);
    CHECK((s.Jdot - vec({0, 0, 2})).norm() <= 1e-12);
  }
  const JacobiInit init{vec({0.3, -1, 2}), vec({0.5, 0.1, -0.7})};
  const JacobiField K = integrate_jacobi(geo, init);
  for (const auto& s : K.samples) CHECK((s.J - oracle::flat_jacobi(init, s.t)).norm() <= 1e-12);
  const JacobiField Z = integrate_jacobi(geo, {Vec::Zero(3), Vec::Zero(3)});
  for (const auto& s : Z.samples) CHECK((s.J.norm() + s.Jdot.norm()) == 0.0);
}

TEST_CASE("Jacobi propagation is linear on a curved model") {
  const auto fx = fixtures::conf(3);
  const CounterRng rng(1, "jacobi_linear");
  auto st = rng.stream();
  const LightRay r = fixtures::random_ray(fx, st);
  const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r, {-0.5, 1.0}));
  const JacobiInit u = fixtures::random_init(st, 3), w = fixtures::random_init(st, 3);
  const double a = 1.7, b = -0.4;
  const JacobiField Ju = integrate_jacobi(geo, u), Jw = integrate_jacobi(geo, w);
  const JacobiField Jc = integrate_jacobi(geo, {a * u.J0 + b * w.J0, a * u.J0dot + b * w.J0dot});
  for (std::size_t i = 0; i < Jc.samples.size(); ++i) {
    CHECK((Jc.samples[i].J - a * Ju.samples[i].J - b * Jw.samples[i].J).norm() <= 1e-9);
    CHECK((Jc.samples[i].Jdot - a * Ju.samples[i].Jdot - b * Jw.samples[i].Jdot).norm() <= 1e-9);
  }
  CHECK(Jc.base().t == 0.0);
  CHECK((Ju.base().J - u.J0).norm() == 0.0);
}

TEST_CASE("Jacobi field interpolation agrees with a finer grid") {
  const auto fx = fixtures::conf(4);
  const CounterRng rng(2, "jacobi_interp");
  auto st = rng.stream();
  const LightRay r = fixtures::random_ray(fx, st);
  const JacobiInit init = fixtures::random_init(st, 4);
  const JacobiField coarse = integrate_jacobi(chart_to_ray(r, {0.0, 1.0}, 800), init);
  const JacobiField fine = integrate_jacobi(chart_to_ray(r, {0.0, 1.0}, 3200), init);
  const double t = 0.6 + 0.3 / 800.0;
  CHECK((coarse.at(t).J - fine.at(t).J).norm() <= 1e-9);
  CHECK((coarse.at(t).Jdot - fine.at(t).Jdot).norm() <= 1e-9);
}

TEST_CASE("grid and data mismatches") {
  const auto geo = flat_line();
  CHECK_THROWS_AS(integrate_jacobi(geo, {vec({0, 0}), vec({0, 0})}), GridMismatch);
  NullGeodesic bad = *geo;
  std::swap(bad.nodes[3], bad.nodes[4]);
  CHECK_THROWS_AS(integrate_jacobi(bad, {vec({0, 0, 1}), vec({0, 0, 0})}), GridMismatch);
}

TEST_CASE("variation oracle on flat families") {
  const auto m = minkowski(3);
  auto lambda = [](double s) { return vec({0, s, 0}); };
  auto W = [](double) { return vec({1, 1, 0}); };
  const auto o = variation_jacobi_oracle(m, lambda, W, 1e-3, {0.0, 1.0}, 200);
  for (const auto& J : o.J) CHECK((J - vec({0, 1, 0})).norm() <= 1e-10);
  auto W2 = [](double s) { return vec({1, std::cos(s), std::sin(s)}); };
  const auto o2 = variation_jacobi_oracle(m, [](double) { return vec({0, 0, 0}); }, W2, 1e-3, {0.0, 1.0}, 200);
  for (std::size_t i = 0; i < o2.t.size(); ++i)
    CHECK((o2.J[i] - o2.t[i] * vec({0, 0, 1})).norm() <= 1e-6 * (1 + o2.t[i]));
  CHECK((o2.DW_ds - vec({0, 0, 1})).norm() <= 1e-10);
  CHECK(o2.lambda_prime.norm() == 0.0);
}

TEST_CASE("variation oracle converges to the propagated field at second order") {
  const auto fx = fixtures::conf(3);
  const SpacetimeModel& model = fx.model;
  const Vec p = vec({0, 0.1, -0.2});
  auto lambda = [&](double s) { return Vec(p + s * vec({0, 0.6, 0.8})); };
  auto W = [&](double s) { return make_null(model, lambda(s), vec({1.0, 0.3 + s})); };
  std::vector<double> errs;
  for (double ds : {1e-2, 5e-3, 2.5e-3}) {
    const auto o = variation_jacobi_oracle(model, lambda, W, ds, {0.0, 1.0}, 800);
    const JacobiField J = integrate_jacobi(integrate_geodesic(model, p, W(0.0), {0.0, 1.0}, 800),
                                           {o.lambda_prime, o.DW_ds});
    double e = 0.0;
    for (std::size_t i = 0; i < o.J.size(); ++i) e = std::max(e, (o.J[i] - J.samples[i].J).norm());
    errs.push_back(e);
  }
  const auto orders = observed_orders(errs);
  for (double q : orders) CHECK(q >= 1.9);
  CHECK(errs.back() <= 1e-5);
}

TEST_CASE("affine pairing fit and light-ray membership") {
  const auto geo = flat_line(0.0, 1.0);
  const auto f1 = affine_pairing_fit(integrate_jacobi(geo, {vec({0, 0, 1}), vec({0, 0, 2})}));
  CHECK(std::abs(f1.a) <= 1e-12);
  CHECK(std::abs(f1.b) <= 1e-12);
  CHECK(f1.residual <= 1e-12);
  const auto f2 = affine_pairing_fit(integrate_jacobi(geo, {vec({1, 0, 0}), vec({0, 0, 0})}));
  CHECK_THAT(f2.a, WithinAbs(-1.0, 1e-12));
  CHECK_THAT(f2.b, WithinAbs(0.0, 1e-12));
  CHECK(is_lightray_jacobi(integrate_jacobi(geo, {vec({0, 0, 1}), vec({0, 0, 2})})));
  const JacobiField lin = integrate_jacobi(geo, {vec({0, 0, 0}), vec({1, 0, 0})});
  CHECK_THAT(affine_pairing_fit(lin).b, WithinAbs(-1.0, 1e-12));
  CHECK_FALSE(is_lightray_jacobi(lin));
  // Inclusive boundary: b = -1 exactly at tol = 1.
  const double b = std::abs(affine_pairing_fit(lin).b);
  CHECK(is_lightray_jacobi(lin, b));
  CHECK_FALSE(is_lightray_jacobi(lin, std::nextafter(b, 0.0)));

  const auto fx = fixtures::conf(4);
  const CounterRng rng(3, "pairing");
  auto st = rng.stream();
  for (int k = 0; k < 5; ++k) {
    const LightRay r = fixtures::random_ray(fx, st);
    const JacobiField J = integrate_jacobi(chart_to_ray(r, {-0.5, 1.0}), fixtures::random_init(st, 4));
    CHECK(affine_pairing_fit(J).residual <= 1e-7);
  }
}

TEST_CASE("mod_gamma_reduce") {
  const auto geo = flat_line(0.0, 1.0);
  const JacobiClass zero = mod_gamma_reduce(*geo, {vec({1, 1, 0}), vec({0, 0, 0})});
  CHECK(zero.w.norm() <= 1e-15);
  CHECK(zero.wdot.norm() <= 1e-15);
  const JacobiClass c = mod_gamma_reduce(*geo, {vec({1, 2, 3}), vec({0, 0, 0})});
  CHECK((c.w - vec({0, 1, 3})).norm() <= 1e-15);
  const JacobiInit base{vec({0.2, 0.5, -1}), vec({0.3, 0.3, 0.4})};
  const JacobiClass ref = mod_gamma_reduce(*geo, base);
  for (double a : {-1.0, 2.5})
    for (double b : {-1.0, 2.5}) {
      const JacobiClass shifted =
          mod_gamma_reduce(*geo, {base.J0 + a * vec({1, 1, 0}), base.J0dot + b * vec({1, 1, 0})});
      CHECK(class_distance(ref, shifted) <= 1e-14);
    }
  CHECK_THROWS_AS(mod_gamma_reduce(*geo, {vec({0, 0, 0}), vec({1, 0, 0})}), NotLightRayField);
  const auto unnorm = integrate_ray(minkowski(3), vec({0, 0, 0}), vec({2, 2, 0}), 0.0, 1.0);
  CHECK_THROWS_AS(mod_gamma_reduce(unnorm, {vec({0, 0, 1}), vec({0, 0, 0})}), NotNormalized);
}

TEST_CASE("class_distance") {
  const auto geo = flat_line(0.0, 1.0);
  const JacobiClass a = mod_gamma_reduce(*geo, {vec({0, 1, 2}), vec({0, 0, 1})});
  const JacobiClass b = mod_gamma_reduce(*geo, {vec({0, 1, 0}), vec({0, 0, 0})});
  CHECK(class_distance(a, a) == 0.0);
  CHECK(class_distance(a, b) == class_distance(b, a));
  const auto other = integrate_ray(minkowski(3), vec({0, 0.5, 0}), vec({1, 1, 0}), 0.0, 1.0);
  const JacobiClass c = mod_gamma_reduce(other, {vec({0, 1, 0}), vec({0, 0, 0})});
  CHECK_THROWS_AS(class_distance(a, c), BaseMismatch);
}

TEST_CASE("dimension bookkeeping of the solution space") {
  const auto fx = fixtures::conf(3);
  const CounterRng rng(4, "dims");
  auto st = rng.stream();
  const LightRay r = fixtures::random_ray(fx, st);
  const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r, {0.0, 0.5}));
  const int m = 3;
  Mat all(2 * m, 2 * m), lightray(2 * m, 2 * m);
  const Mat g = fx.model.metric_raw(r.event());
  for (int k = 0; k < 2 * m; ++k) {
    JacobiInit init = fixtures::random_init(st, m);
    auto end = integrate_jacobi(geo, init).samples.back();
    all.col(k) << end.J, end.Jdot;
    init.J0dot -= (inner(g, init.J0dot, r.v) / inner(g, fx.model.timelike_raw(r.event()), r.v)) *
                  fx.model.timelike_raw(r.event());
    auto end_l = integrate_jacobi(geo, init).samples.back();
    lightray.col(k) << end_l.J, end_l.Jdot;
  }
  CHECK(Eigen::FullPivLU<Mat>(all).setThreshold(1e-9).rank() == 2 * m);
  CHECK(Eigen::FullPivLU<Mat>(lightray).setThreshold(1e-9).rank() == 2 * m - 1);
}

TEST_CASE("Jacobi CSV") {
  const auto geo = flat_line(0.0, 1.0);
  std::ostringstream os;
  write_jacobi_csv(os, integrate_jacobi(geo, {vec({0, 0, 1}), vec({0, 0, 2})}));
  CHECK(os.str().rfind("t,J0,J1,J2,Jd0,Jd1,Jd2,pairing\n", 0) == 0);
}

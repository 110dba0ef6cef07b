#include <catch_amalgamated.hpp>

#include <numbers>
#include <sstream>

#include "lightrays/fixtures.hpp"

using namespace lightrays;
using Catch::Matchers::WithinAbs;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

std::shared_ptr<const CauchyChart> flat_chart(int m = 3) {
  return std::make_shared<const CauchyChart>(build_chart(minkowski(m), Box::cube(m, 2.0), 0.0));
}
}  // namespace

TEST_CASE("build_chart frames") {
  const auto chart = flat_chart();
  const Frame f = chart->frame(vec({0, 0.3, -1}));
  CHECK((f.T_hat - vec({1, 0, 0})).norm() == 0.0);
  CHECK((f.e[0] - vec({0, 1, 0})).norm() == 0.0);
  CHECK((f.e[1] - vec({0, 0, 1})).norm() == 0.0);

  const auto c = fixtures::conf(3);
  const CounterRng rng(1, "frames");
  auto st = rng.stream();
  for (int k = 0; k < 20; ++k) {
    const Vec x = c.chart->event(st.uniform_vec(2, -1, 1));
    const Frame fr = c.chart->frame(x);
    const double es = std::exp(-c.model.metric().sigma.value(x));
    CHECK((fr.T_hat - es * vec({1, 0, 0})).norm() <= 1e-14);
    CHECK((fr.e[0] - es * vec({0, 1, 0})).norm() <= 1e-14);
    CHECK((fr.e[1] - es * vec({0, 0, 1})).norm() <= 1e-14);
  }
  // Tilted, time-independent factor keeps the slice spacelike.
  CHECK_NOTHROW(build_chart(conformal_flat(3, Expression::parse("0.3*x1 + 0.2*sin(x2)")), Box::cube(3, 1.0), 0.0));
}

TEST_CASE("build_chart errors") {
  CHECK_THROWS_AS(build_chart(minkowski(3), Box::cube(3, 1.0), 1.5), SliceOutsideBox);
  CHECK_THROWS_AS(build_chart(minkowski(3, 1.0), Box::cube(3, 2.0), 0.0), SliceOutsideBox);
  // Metric with a timelike coordinate direction on the slice.
  ModelData d = flat_model_data(3, 2.0);
  d.metric.flat_base = false;
  d.metric.base = [](const Vec&) {
    Mat g = Mat::Zero(3, 3);
    g(0, 0) = 1.0;
    g(1, 1) = -1.0;
    g(2, 2) = 1.0;
    return g;
  };
  d.timelike = [](const Vec&) { return vec({0, 1, 0}); };
  d.metric.christoffel = nullptr;
  CHECK_THROWS_AS(build_chart(SpacetimeModel(d), Box::cube(3, 1.0), 0.0), NotSpacelike);
}

TEST_CASE("ray_to_chart") {
  const auto chart = flat_chart();
  const auto m = chart->model();
  const auto geo = integrate_ray(m, vec({1, 1, 0}), vec({2, 2, 0}), -1.0, 1.0);
  const LightRay r = ray_to_chart(chart, geo);
  CHECK(r.q.norm() <= 1e-12);
  CHECK((r.v - vec({1, 1, 0})).norm() <= 1e-12);
  CHECK_THAT(crossing_parameter(geo, 0.0), WithinAbs(-0.5, 1e-12));

  CHECK_THROWS_AS(ray_to_chart(chart, integrate_ray(m, vec({1, 0, 0}), vec({1, 1, 0}), 0.0, 1.0)), NoCrossing);
  NullGeodesic twice = geo;
  twice.nodes.push_back({2.0, vec({-1, 0, 0}), vec({1, 1, 0})});
  CHECK_THROWS_AS(ray_to_chart(chart, twice), MultipleCrossings);
}

TEST_CASE("ray_to_chart is invariant under shifts and rescalings") {
  for (const auto& fx : fixtures::standard()) {
    const CounterRng rng(2, "chart_invariance");
    auto st = rng.stream();
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const NullGeodesic g = chart_to_ray(r, {-1.0, 1.0});
      for (double shift : {-0.3, 0.4})
        for (double lambda : {0.5, 3.0}) {
          const GeodesicState s = g.state_at(shift);
          const int spu = static_cast<int>(std::ceil(800 * lambda));
          const NullGeodesic h = integrate_ray(fx.model, s.x, lambda * s.v, -1.0 / lambda, 1.0 / lambda, spu);
          const LightRay back = ray_to_chart(fx.chart, h);
          INFO(fx.name << " shift " << shift << " lambda " << lambda);
          CHECK((back.q - r.q).norm() <= 1e-9);
          CHECK((back.v - r.v).norm() <= 1e-9);
        }
    }
  }
}

TEST_CASE("chart_to_ray round trip and degenerate span") {
  for (const auto& fx : fixtures::standard()) {
    const CounterRng rng(3, "round_trip");
    auto st = rng.stream();
    const LightRay r = fixtures::random_ray(fx, st);
    const LightRay back = ray_to_chart(fx.chart, chart_to_ray(r, {-0.5, 0.5}));
    CHECK((back.q - r.q).norm() <= 1e-8);
    CHECK((back.v - r.v).norm() <= 1e-8);
    CHECK(chart_to_ray(r, {0.0, 0.0}).nodes.size() == 1);
  }
  const auto p = std::make_shared<const CauchyChart>(
      build_chart(punctured_minkowski2(), Box(vec({-1, -3}), vec({0.9, 3})), 0.0));
  const LightRay r = make_light_ray(p, vec({0.25}), vec({1, 1}));
  const LightRay back = ray_to_chart(p, chart_to_ray(r, {-0.5, 2.0}));
  CHECK((back.q - r.q).norm() <= 1e-8);
  const auto chart = flat_chart();
  CHECK_THROWS_AS(make_light_ray(chart, vec({0, 0}), vec({2, 2, 0})), NotNormalized);
  CHECK_THROWS_AS(make_light_ray(chart, vec({0, 0}), vec({1, 0.5, 0})), NotNull);
  CHECK_THROWS_AS(make_light_ray(chart, vec({5, 0}), vec({1, 1, 0})), OutOfDomain);
}

TEST_CASE("ray coordinates") {
  const auto chart = flat_chart();
  const RayCoords a = ray_coords(make_light_ray(chart, vec({0, 0}), vec({1, 1, 0})));
  CHECK(a.values.size() == 3);
  CHECK(a.values.norm() == 0.0);
  const RayCoords b = ray_coords(make_light_ray(chart, vec({0, 0}), vec({1, 0, 1})));
  CHECK_THAT(b.values[2], WithinAbs(std::numbers::pi / 2, 1e-15));
  CHECK(ray_coords_size(3) == 3);
  CHECK(ray_coords_size(4) == 5);
  CHECK(ray_coords_size(2) == 1);

  for (const auto& fx : fixtures::standard()) {
    const CounterRng rng(4, "coords");
    auto st = rng.stream();
    const int m = fx.model.dim();
    for (int k = 0; k < 100; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const RayCoords c = ray_coords(r);
      CHECK(c.values.size() == 2 * m - 3);
      const LightRay back = coords_to_ray(fx.chart, c);
      CHECK((back.v - r.v).norm() <= 1e-10);
      CHECK(coords_distance(ray_coords(back), c, m) <= 1e-10);
    }
  }
  const auto c2 = std::make_shared<const CauchyChart>(build_chart(minkowski(2), Box::cube(2, 1.0), 0.0));
  const RayCoords left = ray_coords(make_light_ray(c2, vec({0.1}), vec({1, -1})));
  CHECK(left.values.size() == 1);
  CHECK(left.orientation == -1);
  CHECK((coords_to_ray(c2, left).v - vec({1, -1})).norm() <= 1e-15);
}

TEST_CASE("tangent_from_ray_curve on explicit families") {
  const auto chart = flat_chart();
  const auto translation = [&](double s) { return make_light_ray(chart, vec({s, 0}), vec({1, 1, 0})); };
  const JacobiClass t = tangent_from_ray_curve(translation);
  CHECK((t.w - vec({0, 1, 0})).norm() <= 1e-12);
  CHECK(t.wdot.norm() <= 1e-12);
  CHECK_THAT(inner(minkowski_eta(3), t.v, t.w), WithinAbs(1.0, 1e-12));

  const auto rotation = [&](double s) {
    return make_light_ray(chart, vec({0, 0}), vec({1, std::cos(s), std::sin(s)}));
  };
  const JacobiClass r = tangent_from_ray_curve(rotation);
  CHECK(r.w.norm() <= 1e-12);
  CHECK((r.wdot - vec({0, 0, 1})).norm() <= 1e-10);

  const JacobiClass z = tangent_from_ray_curve([&](double) { return translation(0.0); });
  CHECK(z.w.norm() + z.wdot.norm() == 0.0);
}

TEST_CASE("chart tangents are linear in the curve") {
  for (const auto& fx : fixtures::standard()) {
    const CounterRng rng(5, "tangent_linear");
    auto st = rng.stream();
    const int m = fx.model.dim();
    const LightRay r = fixtures::random_ray(fx, st);
    const RayCoords c0 = ray_coords(r);
    const Vec dir = st.normal_vec(2 * m - 3);
    const JacobiClass base = tangent_from_ray_curve(coordinate_curve(fx.chart, c0, dir));
    for (double a : {2.0, -1.0}) {
      const JacobiClass scaled = tangent_from_ray_curve(coordinate_curve(fx.chart, c0, a * dir));
      CHECK(class_distance(scaled, combine(base, a, base, 0.0)) <= 1e-8);
    }
  }
}

TEST_CASE("rays CSV round trip") {
  const auto chart = flat_chart();
  std::vector<RayCoords> rays{ray_coords(make_light_ray(chart, vec({0.1, 0.2}), vec({1, 0.6, 0.8}))),
                              ray_coords(make_light_ray(chart, vec({-0.3, 0}), vec({1, 0, -1})))};
  std::stringstream ss;
  write_rays_csv(ss, rays, 3);
  CHECK(ss.str().rfind("q1,q2,a1\n", 0) == 0);
  const auto back = read_rays_csv(ss, 3);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK((back[i].values - rays[i].values).norm() == 0.0);
  std::stringstream bad("q1,q2,a1\n0.1,zz,3\n");
  CHECK_THROWS_AS(read_rays_csv(bad, 3), ParseError);
  std::stringstream short_row("q1,q2,a1\n0.1,0.2\n");
  CHECK_THROWS_AS(read_rays_csv(short_row, 3), ParseError);
}

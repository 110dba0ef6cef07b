#pragma once

// Deterministic fixture set: flat and conformally flat models in m = 3, 4,
// a chart over [-1, 1]^m with slice x0 = 0, and seeded random rays/classes.

#include <memory>
#include <string>
#include <vector>

#include "lightrays/contact.hpp"

namespace lightrays::fixtures {

inline constexpr const char* kSigma3 = "0.2*sin(x1) + 0.1*sin(x0 + x2)";
inline constexpr const char* kSigma4 = "0.15*sin(x1) + 0.1*sin(x2 + x3) + 0.05*x0";
// Second conformal factor for comparing representatives of one class.
inline constexpr const char* kSigmaBar3 = "0.1*sin(x0 + 2*x1) + 0.05*x2";
inline constexpr const char* kSigmaBar4 = "0.1*sin(x0 + 2*x1) + 0.05*x3";

struct Fixture {
  std::string name;
  SpacetimeModel model;
  std::shared_ptr<const CauchyChart> chart;
  bool flat = false;
};

inline Fixture make_fixture(std::string name, const SpacetimeModel& model, bool flat, double half = 1.0,
                            double c0 = 0.0) {
  auto chart = std::make_shared<const CauchyChart>(build_chart(model, Box::cube(model.dim(), half), c0));
  return {std::move(name), model, std::move(chart), flat};
}

inline Fixture mink(int m) { return make_fixture("mink" + std::to_string(m), minkowski(m), true); }

inline Fixture conf(int m) {
  const char* sigma = m == 3 ? kSigma3 : kSigma4;
  return make_fixture("conf" + std::to_string(m), conformal_flat(m, Expression::parse(sigma)), false);
}

inline std::vector<Fixture> standard() { return {mink(3), mink(4), conf(3), conf(4)}; }

inline std::vector<Fixture> curved() { return {conf(3), conf(4)}; }

inline Expression sigma_bar(int m) { return Expression::parse(m == 3 ? kSigmaBar3 : kSigmaBar4); }

// Unit vector with normally distributed components.
inline Vec random_unit(CounterRng::Stream& st, int n) {
  Vec u = st.normal_vec(n);
  while (u.norm() < 1e-3) u = st.normal_vec(n);
  return u / u.norm();
}

// Ray through a point of [-r, r]^(m-1) on the slice with a random direction.
inline LightRay random_ray(const std::shared_ptr<const CauchyChart>& chart, CounterRng::Stream& st, double r = 0.5) {
  const int m = chart->dim();
  const Vec q = st.uniform_vec(m - 1, -r, r);
  const Vec x = chart->event(q);
  const Frame f = chart->frame(x);
  const Vec s = random_unit(st, m - 1);
  Vec dir = Vec::Zero(m);
  for (int i = 0; i < m - 1; ++i) dir += s[i] * f.e[static_cast<std::size_t>(i)];
  return make_light_ray(chart, q, make_null_from_vector(chart->model(), x, dir));
}

inline LightRay random_ray(const Fixture& fx, CounterRng::Stream& st, double r = 0.5) {
  return random_ray(fx.chart, st, r);
}

// Random element of L(gamma) at the ray: w in T-perp, wdot in {v, T}-perp.
inline JacobiClass random_class(const LightRay& ray, CounterRng::Stream& st) {
  const SpacetimeModel& model = ray.model();
  const int m = model.dim();
  const Vec x = ray.event();
  const Mat g = model.metric_raw(x);
  const Vec T = model.timelike_raw(x);
  const Vec r = st.normal_vec(m);
  const Vec w = r - (inner(g, r, T) / inner(g, ray.v, T)) * ray.v;
  Vec wdot = Vec::Zero(m);
  for (const auto& e : screen_basis(ray)) wdot += st.normal() * e;
  return {model, x, ray.v, w, wdot};
}

inline JacobiInit random_init(CounterRng::Stream& st, int m) { return {st.normal_vec(m), st.normal_vec(m)}; }

}  // namespace lightrays::fixtures

#pragma once

// Per-ray residual probes for the structural identities: each returns a
// defect that vanishes (up to discretization) when the identity holds.

#include <cmath>
#include <memory>
#include <vector>

#include "lightrays/fixtures.hpp"
#include "lightrays/oracles.hpp"

namespace lightrays::probes {

// A variation by light rays through the ray: events p + s a on the slice
// direction a, velocities from the direction v + s d, normalized by T.
// a and d are unit coordinate vectors tangent to the slice.
struct RayVariation {
  SpacetimeModel model;  // normalization metric
  Vec p;
  Vec v;
  Vec a;
  Vec d;

  Vec alpha(double s) const { return p + s * a; }
  Vec u(double s) const { return make_null_from_vector(model, alpha(s), v + s * d); }
};

inline RayVariation random_variation(const LightRay& ray, CounterRng::Stream& st) {
  const int m = ray.chart->dim();
  Vec a = Vec::Zero(m);
  a.tail(m - 1) = fixtures::random_unit(st, m - 1);
  Vec d = Vec::Zero(m);
  d.tail(m - 1) = fixtures::random_unit(st, m - 1);
  return {ray.model(), ray.event(), ray.v, a, d};
}

// --- Jacobi module ------------------------------------------------------------------------

// Classes of the same variation propagated with g and with exp(2 sigma_bar) g,
// compared as g-classes at common events. The rescaled geodesic is obtained
// from the g-geodesic by the affine reparametrization of its pregeodesic;
// its field is pulled back to the g parameter and g-covariant derivative.
inline double conformal_class_defect(const RayVariation& var, const Expression& sigma_bar,
                                     const std::vector<double>& events, double ds = 1e-3,
                                     int steps_per_unit = kDefaultStepsPerUnit) {
  const SpacetimeModel& g = var.model;
  const ScalarField sb = ScalarField::from_expression(sigma_bar);
  const SpacetimeModel gbar = conformal_rescale(g, sb);
  auto alpha = [&](double s) { return var.alpha(s); };
  auto u = [&](double s) { return var.u(s); };
  const JacobiInit init_g = variation_initial_data(g, alpha, u, ds);
  const JacobiInit init_b = variation_initial_data(gbar, alpha, u, ds);

  double t_end = 0.0;
  for (double t : events) t_end = std::max(t_end, t);
  const int n = steps_for(t_end, steps_per_unit);
  const auto geo_g = std::make_shared<const NullGeodesic>(integrate_geodesic(g, var.p, u(0.0), {0.0, t_end}, n));
  if (geo_g->forward.reason != Termination::IntervalEnd) throw OutOfDomain("base geodesic left the domain");

  Pregeodesic pre;
  for (const auto& node : geo_g->nodes) {
    pre.t.push_back(node.t);
    pre.x.push_back(node.x);
    pre.xdot.push_back(node.v);
    pre.f.push_back(2.0 * sb.gradient(node.x).dot(node.v));
  }
  const Reparametrization rep = reparametrize_to_geodesic(gbar, pre);
  const auto geo_b = std::make_shared<const NullGeodesic>(rep.geodesic);

  const JacobiField Jg = integrate_jacobi(geo_g, init_g);
  const JacobiField Jb = integrate_jacobi(geo_b, init_b);

  double worst = 0.0;
  for (double t1 : events) {
    const auto i = static_cast<std::size_t>(std::lround(t1 / t_end * n));
    const GeodesicNode& node = geo_g->nodes[i];
    const double tau = rep.h_inverse[i];
    const GeodesicState sb_state = geo_b->state_at(tau);
    const double dtau_dt = node.v.dot(sb_state.v) / sb_state.v.squaredNorm();
    const JacobiSample bar = Jb.at(tau);
    const Vec coord = bar.Jdot - gbar.christoffel_raw(sb_state.x).contract(sb_state.v, bar.J);
    const Vec Dt = dtau_dt * coord + g.christoffel_raw(node.x).contract(node.v, bar.J);
    const JacobiClass cb = reduce_at(g, node.x, node.v, bar.J, Dt, true);
    const JacobiClass cg = reduce_at(g, node.x, node.v, Jg.samples[i].J, Jg.samples[i].Jdot, true);
    worst = std::max(worst, class_distance(cg, cb));
  }
  return worst;
}

// Two variations realizing the same curve of rays: the second starts each
// ray at parameter 0.3 s along it and rescales its velocity by 1 + 0.5 s.
// Classes are compared at the base and after propagation to t = 1.
inline double reparametrization_defect(const RayVariation& var, double ds = 1e-3,
                                       int steps_per_unit = kDefaultStepsPerUnit) {
  const SpacetimeModel& g = var.model;
  auto alpha = [&](double s) { return var.alpha(s); };
  auto u = [&](double s) { return var.u(s); };
  auto moved = [&](double s) {
    const double t0 = 0.3 * s;
    if (t0 == 0.0) return GeodesicState{alpha(s), u(s)};
    const NullGeodesic geo = integrate_geodesic(g, alpha(s), u(s), {0.0, t0}, kMinSteps);
    const auto& end = t0 > 0 ? geo.nodes.back() : geo.nodes.front();
    return GeodesicState{end.x, end.v};
  };
  const JacobiInit A = variation_initial_data(g, alpha, u, ds);
  const JacobiInit B = variation_initial_data(
      g, [&](double s) { return moved(s).x; }, [&](double s) { return Vec((1.0 + 0.5 * s) * moved(s).v); }, ds);
  const auto geo = std::make_shared<const NullGeodesic>(
      integrate_geodesic(g, var.p, u(0.0), {0.0, 1.0}, steps_for(1.0, steps_per_unit)));
  double worst = class_distance(mod_gamma_reduce(*geo, A), mod_gamma_reduce(*geo, B));
  const JacobiSample ja = integrate_jacobi(geo, A).samples.back();
  const JacobiSample jb = integrate_jacobi(geo, B).samples.back();
  const GeodesicNode& end = geo->nodes.back();
  worst = std::max(worst, class_distance(reduce_at(g, end.x, end.v, ja.J, ja.Jdot, true),
                                         reduce_at(g, end.x, end.v, jb.J, jb.Jdot, true)));
  return worst;
}

struct OracleErrors {
  std::vector<double> ds;
  std::vector<double> errors;        // max_t |J_FD - J_ODE|
  std::vector<double> init_defects;  // |J_FD(0) - lambda'(0)| and |DJ_FD/dt(0) - DW/ds(0)|
};

// Observed order from errors at successively halved steps (smallest pair).
inline double observed_order(const std::vector<double>& e) {
  const std::size_t n = e.size();
  if (n < 2 || e[n - 1] <= 0.0 || e[n - 2] <= 0.0) return 0.0;
  return std::log2(e[n - 2] / e[n - 1]);
}

// Finite-difference variation vs the propagated field with the analytic
// initial values, over ds in {1e-2, 5e-3, 2.5e-3}.
inline OracleErrors variation_oracle_errors(const RayVariation& var,
                                            const JacobiGenerator& generator = detail::jacobi_generator,
                                            int steps_per_unit = kDefaultStepsPerUnit) {
  OracleErrors out;
  const SpacetimeModel& model = var.model;
  const int n = steps_for(1.0, steps_per_unit);
  auto lambda = [&](double s) { return var.alpha(s); };
  auto W = [&](double s) { return var.u(s); };
  const NullGeodesic base = integrate_geodesic(model, var.p, W(0.0), {0.0, 1.0}, n);
  for (double ds : {1e-2, 5e-3, 2.5e-3}) {
    const VariationOracle o = variation_jacobi_oracle(model, lambda, W, ds, {0.0, 1.0}, n);
    const JacobiField J = integrate_jacobi(base, {o.lambda_prime, o.DW_ds}, generator);
    double e = 0.0;
    for (std::size_t i = 0; i < o.J.size(); ++i) e = std::max(e, (o.J[i] - J.samples[i].J).norm());
    out.ds.push_back(ds);
    out.errors.push_back(e);
    const auto dJ = finite_difference_derivative5<Vec>(o.t, std::span<const Vec>(o.J));
    const Vec DJ0 = dJ[0] + model.christoffel_raw(base.nodes[0].x).contract(base.nodes[0].v, o.J[0]);
    out.init_defects.push_back(std::max((o.J[0] - o.lambda_prime).norm(), (DJ0 - o.DW_ds).norm()));
  }
  return out;
}

// Planted bug for mutation testing: Christoffel corrections with the wrong sign.
inline Mat gamma_sign_mutant(const SpacetimeModel& model, const Vec& x, const Vec& v) {
  const int m = model.dim();
  Mat A = detail::jacobi_generator(model, x, v);
  A.topLeftCorner(m, m) *= -1.0;
  A.bottomRightCorner(m, m) *= -1.0;
  return A;
}

// --- light-ray charts -----------------------------------------------------------------------

// The ray integrated from a shifted start and rescaled velocity maps back to
// the same chart point.
inline double chart_invariance_defect(const LightRay& ray, double shift, double lambda) {
  const NullGeodesic g = chart_to_ray(ray, {-1.0, 1.0});
  const GeodesicState s = g.state_at(shift);
  const int spu = static_cast<int>(std::ceil(kDefaultStepsPerUnit * lambda));
  const NullGeodesic h = integrate_ray(ray.model(), s.x, lambda * s.v, -1.0 / lambda, 1.0 / lambda, spu);
  const LightRay back = ray_to_chart(ray.chart, h);
  return std::max((back.q - ray.q).norm(), (back.v - ray.v).norm());
}

inline double round_trip_defect(const LightRay& ray) {
  const LightRay back = ray_to_chart(ray.chart, chart_to_ray(ray, {-0.5, 0.5}));
  const RayCoords c = ray_coords(ray);
  const double coords = coords_distance(ray_coords(coords_to_ray(ray.chart, c)), c, ray.chart->dim());
  return std::max({(back.q - ray.q).norm(), (back.v - ray.v).norm(), coords});
}

inline double tangent_linearity_defect(const LightRay& ray, const Vec& dir, double a) {
  const RayCoords c0 = ray_coords(ray);
  const JacobiClass base = tangent_from_ray_curve(coordinate_curve(ray.chart, c0, dir));
  const JacobiClass scaled = tangent_from_ray_curve(coordinate_curve(ray.chart, c0, a * dir));
  return class_distance(scaled, combine(base, a, base, 0.0));
}

// The same chart curve realized through a second Cauchy slice x0 = c0 + dc:
// its class is transported back along the ray and compared at the base.
inline double variation_independence_defect(const LightRay& ray, const Vec& dir, double dc = 0.25) {
  const auto& chart = ray.chart;
  const auto chart2 = std::make_shared<const CauchyChart>(
      build_chart(chart->model(), chart->V(), chart->c0() + dc));
  const auto curve = coordinate_curve(chart, ray_coords(ray), dir);
  const JacobiClass c1 = tangent_from_ray_curve(curve);
  const auto curve2 = [&](double s) { return ray_to_chart(chart2, chart_to_ray(curve(s), {-0.5, 1.0})); };
  const JacobiClass c2 = tangent_from_ray_curve(curve2);
  const LightRay r2 = curve2(0.0);
  const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r2, {-1.0, 0.0}));
  const JacobiField J = integrate_jacobi(geo, {c2.w, c2.wdot});
  const double t_star = crossing_parameter(*geo, chart->c0());
  const JacobiSample js = J.at(t_star);
  const GeodesicState st = geo->state_at(t_star);
  JacobiClass back = reduce_at(chart->model(), st.x, st.v, js.J, js.Jdot, true);
  // The transported base agrees with the chart point to integration accuracy.
  const double base_gap = std::max((back.x - c1.x).norm(), (back.v - c1.v).norm());
  back.x = c1.x;
  back.v = c1.v;
  return std::max(class_distance(c1, back), base_gap);
}

// --- contact structure ---------------------------------------------------------------------

// theta_0 via theta_g on the Omega^T(C) curve tangent vs the Jacobi formula
// g(J(t1), gamma'(t1)) after propagation.
inline double two_path_theta_defect(const LightRay& ray, const Vec& dir, double t1 = 0.5, double ds = 1e-3) {
  const auto curve = coordinate_curve(ray.chart, ray_coords(ray), dir);
  const JacobiInit tangent = variation_initial_data(
      ray.model(), [&](double s) { return curve(s).event(); }, [&](double s) { return curve(s).v; }, ds);
  const TMTangent xi{ray.event(), ray.v, tangent.J0, tangent.J0dot - ray.model().christoffel_raw(ray.event()).contract(tangent.J0, ray.v)};
  const double path1 = theta_g(ray.model(), xi);
  const JacobiClass c = tangent_from_ray_curve(curve, ds);
  const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(ray, {0.0, t1}));
  const JacobiSample end = integrate_jacobi(geo, {c.w, c.wdot}).samples.back();
  const GeodesicNode& node = geo->nodes.back();
  const double path2 = inner(ray.model().metric_raw(node.x), end.J, node.v);
  return std::abs(path1 - path2);
}

// Unreduced representatives shifted by (a + bt) gamma' leave theta_0 (all
// light-ray classes) and omega_0 (contact classes) unchanged.
inline double gauge_defect(const LightRay& ray, CounterRng::Stream& st) {
  const SpacetimeModel& model = ray.model();
  const Vec x = ray.event();
  const Mat g = model.metric_raw(x);
  const ContactFrame f = contact_frame(ray);
  double worst = 0.0;
  const JacobiClass c = fixtures::random_class(ray, st);
  JacobiClass h1 = f.basis[0], h2 = f.basis.back();
  for (std::size_t k = 0; k < f.basis.size(); ++k) {
    h1 = combine(h1, 1.0, f.basis[k], st.normal());
    h2 = combine(h2, 1.0, f.basis[k], st.normal());
  }
  for (double a : {-1.0, 0.7})
    for (double b : {-1.0, 0.7}) {
      const JacobiInit rep{c.w + a * ray.v, c.wdot + b * ray.v};
      worst = std::max(worst, std::abs(inner(g, ray.v, rep.J0) - theta0(ray, c)));
      worst = std::max(worst, class_distance(reduce_at(model, x, ray.v, rep.J0, rep.J0dot, false), c));
      const JacobiInit r1{h1.w + a * ray.v, h1.wdot + b * ray.v};
      const JacobiInit r2{h2.w + b * ray.v, h2.wdot + a * ray.v};
      worst = std::max(worst, std::abs(omega0_raw(model, x, r1, r2) - omega0(ray, h1, h2)));
    }
  return worst;
}

using Omega0Fn = std::function<double(const LightRay&, const JacobiClass&, const JacobiClass&)>;

inline double omega0_reference(const LightRay& ray, const JacobiClass& a, const JacobiClass& b) {
  return omega0(ray, a, b);
}

// Planted bug for mutation testing: symmetrized instead of antisymmetrized.
inline double omega0_symmetrized_mutant(const LightRay& ray, const JacobiClass& a, const JacobiClass& b) {
  const Mat g = ray.model().metric_raw(a.x);
  return inner(g, a.w, b.wdot) + inner(g, b.w, a.wdot);
}

// max |omega(c, c)| and max |omega(a, b) + omega(b, a)| over random classes.
inline double antisymmetry_defect(const LightRay& ray, CounterRng::Stream& st, const Omega0Fn& omega, int trials = 8) {
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const JacobiClass a = fixtures::random_class(ray, st), b = fixtures::random_class(ray, st);
    worst = std::max({worst, std::abs(omega(ray, a, a)), std::abs(omega(ray, a, b) + omega(ray, b, a))});
  }
  return worst;
}

struct KernelReport {
  int gram_rank = 0;          // rank of omega_0 on frame + one non-contact class
  int frame_span_rank = 0;    // rank of the frame representatives
  int extended_span_rank = 0; // with the non-contact class appended
  double kernel_theta = 0.0;  // |theta_0| of the unit kernel vector
};

inline int numerical_rank(const Mat& M, double rel = 1e-8) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& s = svd.singularValues();
  const double cut = rel * std::max(1.0, s.maxCoeff());
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cut) ++r;
  return r;
}

inline KernelReport kernel_transverse(const LightRay& ray) {
  const SpacetimeModel& model = ray.model();
  const Vec x = ray.event();
  const Mat g = model.metric_raw(x);
  const Vec T = model.timelike_raw(x);
  ContactFrame f = contact_frame(ray);
  const int m = model.dim();
  auto span = [&](const std::vector<JacobiClass>& cs) {
    Mat S(2 * m, static_cast<Eigen::Index>(cs.size()));
    for (std::size_t k = 0; k < cs.size(); ++k) S.col(static_cast<Eigen::Index>(k)) << cs[k].w, cs[k].wdot;
    return S;
  };
  KernelReport r;
  r.frame_span_rank = numerical_rank(span(f.basis));
  const Vec w = ray.v - (inner(g, ray.v, T) / inner(g, T, T)) * T;  // T-perp part of v, theta_0 > 0
  std::vector<JacobiClass> ext = f.basis;
  ext.push_back({model, x, ray.v, w, Vec::Zero(m)});
  r.extended_span_rank = numerical_rank(span(ext));
  const Mat G = omega0_gram(ray, ext);
  r.gram_rank = numerical_rank(G);
  Eigen::JacobiSVD<Mat> svd(G, Eigen::ComputeFullV);
  const Vec k = svd.matrixV().col(G.cols() - 1);
  JacobiClass kc{model, x, ray.v, Vec::Zero(m), Vec::Zero(m)};
  for (std::size_t i = 0; i < ext.size(); ++i) kc = combine(kc, 1.0, ext[i], k[static_cast<Eigen::Index>(i)]);
  r.kernel_theta = std::abs(theta0(ray, kc));
  return r;
}

// Zero set of theta_0 under a change of conformal representative: frame
// classes reduced and normalized for exp(2 sigma_bar) g.
inline double conformal_hyperplane_defect(const LightRay& ray, const Expression& sigma_bar) {
  const SpacetimeModel gbar = conformal_rescale(ray.model(), ScalarField::from_expression(sigma_bar));
  const Vec x = ray.event();
  const Mat gb = gbar.metric_raw(x);
  double worst = 0.0;
  for (const auto& b : contact_frame(ray).basis) {
    const JacobiClass c = reduce_at(gbar, x, ray.v, b.w, b.wdot, true);
    worst = std::max(worst, std::abs(inner(gb, c.v, c.w)));
  }
  return worst;
}

}  // namespace lightrays::probes

#pragma once

// Tautological and symplectic forms pulled back to TM by the metric, the
// reduced forms on Jacobi classes, contact frames, and residual checks for
// the coisotropic-reduction identities.

#include <cmath>
#include <cstdint>
#include <vector>

#include "lightrays/numerics.hpp"
#include "lightrays/ray_space.hpp"

namespace lightrays {

// A tangent vector to TM at (x, v), split as (dx, dv) in induced coordinates.
struct TMTangent {
  Vec x;
  Vec v;
  Vec dx;
  Vec dv;
};

inline void require_same_base(const TMTangent& a, const TMTangent& b) {
  if ((a.x - b.x).norm() > 0.0 || (a.v - b.v).norm() > 0.0)
    throw BaseMismatch("TM tangents at different base points " + format_point(a.x) + " and " + format_point(b.x));
}

// theta_g = g_ij v^i dx^j
inline double theta_g(const SpacetimeModel& model, const TMTangent& xi) {
  return inner(eval_metric(model, xi.x), xi.v, xi.dx);
}

// Covariant derivative Du/ds = du/ds + Gamma(alpha', u) of the fibre part.
inline Vec covariant_fibre(const SpacetimeModel& model, const TMTangent& xi) {
  return xi.dv + model.christoffel_raw(xi.x).contract(xi.dx, xi.v);
}

// omega_g(xi1, xi2) = g(alpha1', Du2/ds) - g(alpha2', Du1/ds)
inline double omega_g(const SpacetimeModel& model, const TMTangent& xi1, const TMTangent& xi2) {
  require_same_base(xi1, xi2);
  const Mat g = eval_metric(model, xi1.x);
  return inner(g, xi1.dx, covariant_fibre(model, xi2)) - inner(g, xi2.dx, covariant_fibre(model, xi1));
}

// Derivative of the metric along dx, by central differences.
inline Mat metric_directional(const SpacetimeModel& model, const Vec& x, const Vec& dx) {
  const double n = dx.norm();
  if (n == 0.0) return Mat::Zero(model.dim(), model.dim());
  const double h = model.tol().h_fd;
  const Vec u = dx / n;
  return (model.metric_raw(x + h * u) - model.metric_raw(x - h * u)) * (n / (2.0 * h));
}

// d(g-hat): (dx, dv) -> (dx, (d_dx g) v + g dv) on T*M coordinates (x, p).
inline std::pair<Vec, Vec> lower_pushforward(const SpacetimeModel& model, const TMTangent& xi) {
  return {xi.dx, metric_directional(model, xi.x, xi.dx) * xi.v + model.metric_raw(xi.x) * xi.dv};
}

// Canonical omega = dx^i ^ dp_i on T*M.
inline double omega_canonical(const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b) {
  return a.first.dot(b.second) - b.first.dot(a.second);
}

// --- reduced forms on L(gamma) -----------------------------------------------------------

inline void require_class_on_ray(const LightRay& ray, const JacobiClass& c) {
  const Vec x = ray.event();
  if ((c.x - x).norm() > 1e-9 * (1.0 + x.norm()) || (c.v - ray.v).norm() > 1e-9 * (1.0 + ray.v.norm()))
    throw BaseMismatch("class is based at " + format_point(c.x) + ", ray at " + format_point(x));
}

// theta_0([J]) = g(J(0), gamma'(0)) with g(gamma'(0), T) = -1
inline double theta0(const LightRay& ray, const JacobiClass& c) {
  require_class_on_ray(ray, c);
  return inner(ray.model().metric_raw(c.x), ray.v, c.w);
}

// omega_0([J1], [J2]) = g(J1(0), J2'(0)) - g(J2(0), J1'(0))
inline double omega0(const LightRay& ray, const JacobiClass& c1, const JacobiClass& c2) {
  require_class_on_ray(ray, c1);
  require_class_on_ray(ray, c2);
  const Mat g = ray.model().metric_raw(c1.x);
  return inner(g, c1.w, c2.wdot) - inner(g, c2.w, c1.wdot);
}

// The same expression evaluated on arbitrary (unreduced) initial data.
inline double omega0_raw(const SpacetimeModel& model, const Vec& x, const JacobiInit& a, const JacobiInit& b) {
  const Mat g = model.metric_raw(x);
  return inner(g, a.J0, b.J0dot) - inner(g, b.J0, a.J0dot);
}

inline JacobiClass combine(const JacobiClass& a, double ca, const JacobiClass& b, double cb) {
  require_same_base(a, b);
  return {a.model, a.x, a.v, ca * a.w + cb * b.w, ca * a.wdot + cb * b.wdot};
}

// --- contact frames ----------------------------------------------------------------------

struct ContactFrame {
  LightRay ray;
  std::vector<JacobiClass> basis;
  Mat gram;  // omega_0 on the basis
};

inline Mat omega0_gram(const LightRay& ray, const std::vector<JacobiClass>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Mat G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      G(i, j) = omega0(ray, basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
  return G;
}

// Orthonormal basis of {v, T}-perp: the spatial legs of the chart frame with
// the direction of v projected out, most orthogonal legs first.
inline std::vector<Vec> screen_basis(const LightRay& ray) {
  const CauchyChart& chart = *ray.chart;
  const Vec x = ray.event();
  const Mat g = chart.model().metric_raw(x);
  const Frame f = chart.frame(x);
  const int m = chart.dim();
  Vec s = ray.v + inner(g, ray.v, f.T_hat) * f.T_hat;  // spatial part of v
  s /= std::sqrt(inner(g, s, s));
  std::vector<std::size_t> order(f.e.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(inner(g, f.e[a], s)) < std::abs(inner(g, f.e[b], s));
  });
  std::vector<Vec> out;
  for (std::size_t idx : order) {
    if (static_cast<int>(out.size()) == m - 2) break;
    Vec u = f.e[idx] - inner(g, f.e[idx], s) * s;
    for (const auto& b : out) u -= inner(g, u, b) * b;
    const double nn = inner(g, u, u);
    if (nn < 1e-12) continue;
    out.push_back(u / std::sqrt(nn));
  }
  return out;
}

// 2m-4 classes: (e_k, 0) for each screen vector e_k, then (0, e_k).
inline ContactFrame contact_frame(const LightRay& ray) {
  const auto screen = screen_basis(ray);
  const int m = ray.chart->dim();
  ContactFrame f{ray, {}, {}};
  const Vec x = ray.event();
  for (const auto& e : screen) f.basis.push_back({ray.model(), x, ray.v, e, Vec::Zero(m)});
  for (const auto& e : screen) f.basis.push_back({ray.model(), x, ray.v, Vec::Zero(m), e});
  f.gram = omega0_gram(ray, f.basis);
  return f;
}

// Contact frame assembled from chart tangents: the 2m-3 coordinate
// directions are mapped to classes and the one with the largest |theta_0|
// is used to project the others into the hyperplane.
inline ContactFrame chart_contact_frame(std::shared_ptr<const CauchyChart> chart, const LightRay& ray,
                                        double ds = 1e-3) {
  const RayCoords c0 = ray_coords(ray);
  const int n = static_cast<int>(c0.values.size());
  std::vector<JacobiClass> tangents;
  for (int i = 0; i < n; ++i)
    tangents.push_back(tangent_from_ray_curve(coordinate_curve(chart, c0, Vec::Unit(n, i)), ds));
  std::size_t reeb = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < tangents.size(); ++i) {
    const double th = std::abs(theta0(ray, tangents[i]));
    if (th > best) {
      best = th;
      reeb = i;
    }
  }
  ContactFrame f{ray, {}, {}};
  const double th_r = theta0(ray, tangents[reeb]);
  for (std::size_t i = 0; i < tangents.size(); ++i) {
    if (i == reeb) continue;
    f.basis.push_back(combine(tangents[i], 1.0, tangents[reeb], -theta0(ray, tangents[i]) / th_r));
  }
  f.gram = omega0_gram(ray, f.basis);
  return f;
}

struct NondegeneracyReport {
  double det = 0.0;
  double min_singular_value = 0.0;
  bool pass = false;
};

inline NondegeneracyReport nondegeneracy_report(const ContactFrame& frame, double tol_contact = kDefaultTolerances.tol_contact) {
  NondegeneracyReport r;
  if (frame.gram.size() == 0) return r;
  r.det = frame.gram.determinant();
  Eigen::JacobiSVD<Mat> svd(frame.gram);
  r.min_singular_value = svd.singularValues().minCoeff();
  r.pass = r.min_singular_value > tol_contact;
  return r;
}

// --- scale invariance of the hyperplane -------------------------------------------------

// With the unnormalized velocity lambda v the hyperplane {theta_0 = 0} must not
// move and theta_0 must scale by lambda. Returns the larger of the two defects.
inline double scale_invariance_check(const LightRay& ray, double lambda, std::uint64_t seed = 1, int trials = 8) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const SpacetimeModel& model = ray.model();
  const Vec x = ray.event();
  const Mat g = model.metric_raw(x);
  const Vec scaled = lambda * ray.v;
  double r = 0.0;
  // Representatives of the same classes for the parameter rescaled by lambda:
  // J~(t) = J(lambda t), so J~'(0) = lambda J'(0); reduce against lambda v.
  for (const auto& b : contact_frame(ray).basis) {
    const JacobiClass c = reduce_at(model, x, scaled, b.w, lambda * b.wdot, false);
    r = std::max(r, std::abs(inner(g, scaled, c.w)));
  }
  const CounterRng rng(seed, "scale_invariance");
  auto st = rng.stream();
  const Vec T = model.timelike_raw(x);
  for (int k = 0; k < trials; ++k) {
    Vec J0 = st.normal_vec(model.dim());
    Vec J0dot = st.normal_vec(model.dim());
    J0dot -= (inner(g, J0dot, ray.v) / inner(g, T, ray.v)) * T;  // light-ray field
    const JacobiClass c = reduce_at(model, x, ray.v, J0, J0dot, false);
    const JacobiClass cs = reduce_at(model, x, scaled, J0, lambda * J0dot, false);
    r = std::max(r, std::abs(inner(g, scaled, cs.w) - lambda * inner(g, ray.v, c.w)));
  }
  return r;
}

// --- characteristic distribution of the null cone bundle ---------------------------------

// Random tangent to N+ at a null state: dv corrected along T so that the
// linearized null condition (d_dx g)(v,v) + 2 g(v, dv) = 0 holds. A nonzero
// `violation` plants 2 g(v, Dv/ds) = 2*violation instead.
inline TMTangent null_cone_tangent(const SpacetimeModel& model, const GeodesicState& s, const Vec& dx, const Vec& dv,
                                   double violation = 0.0) {
  const Mat g = model.metric_raw(s.x);
  const Vec T = model.timelike_raw(s.x);
  const double lin = inner(metric_directional(model, s.x, dx), s.v, s.v) + 2.0 * inner(g, s.v, dv);
  const Vec corrected = dv + ((2.0 * violation - lin) / (2.0 * inner(g, s.v, T))) * T;
  return {s.x, s.v, dx, corrected};
}

inline TMTangent spray_vector(const SpacetimeModel& model, const GeodesicState& s) {
  return {s.x, s.v, s.v, -model.christoffel_raw(s.x).contract(s.v, s.v)};
}

// max |omega_g(X_g, Y)| over random Y tangent to N+.
inline double spray_kernel_check(const SpacetimeModel& model, const GeodesicState& s, int trials, std::uint64_t seed = 7,
                                 double violation = 0.0) {
  require_null_future(model, s.x, s.v);
  const CounterRng rng(seed, "spray_kernel");
  auto st = rng.stream();
  const TMTangent X = spray_vector(model, s);
  double r = 0.0;
  for (int k = 0; k < trials; ++k) {
    const Vec dx = st.normal_vec(model.dim());
    const Vec dv = st.normal_vec(model.dim());
    r = std::max(r, std::abs(omega_g(model, X, null_cone_tangent(model, s, dx, dv, violation))));
  }
  return r;
}

// Planted control: min |omega_g(X_g, Y)| over Y violating tangency by
// g(v, Dv/ds) = violation.
inline double spray_kernel_control(const SpacetimeModel& model, const GeodesicState& s, int trials,
                                   std::uint64_t seed = 7, double violation = 1e-2) {
  require_null_future(model, s.x, s.v);
  const CounterRng rng(seed, "spray_kernel_control");
  auto st = rng.stream();
  const TMTangent X = spray_vector(model, s);
  double r = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    const Vec dx = st.normal_vec(model.dim());
    const Vec dv = st.normal_vec(model.dim());
    r = std::min(r, std::abs(omega_g(model, X, null_cone_tangent(model, s, dx, dv, violation))));
  }
  return r;
}

// --- spray vs Hamiltonian field, Euler vs Liouville ---------------------------------------

struct IntertwineResiduals {
  double r_delta = 0.0;  // |g-hat_* Delta - E|
  double r_x = 0.0;      // |g-hat_* X_g - X_H|
};

// X_H = g^{ki} p_i d/dx^k - 1/2 (d_k g^{ij}) p_i p_j d/dp_k
inline std::pair<Vec, Vec> hamiltonian_field(const SpacetimeModel& model, const Vec& x, const Vec& p) {
  const int m = model.dim();
  const double h = model.tol().h_fd;
  Vec dp(m);
  for (int k = 0; k < m; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Mat dginv = (model.metric_raw(xp).inverse() - model.metric_raw(xm).inverse()) / (2.0 * h);
    dp[k] = -0.5 * p.dot(dginv * p);
  }
  return {model.metric_raw(x).ldlt().solve(p), dp};
}

inline IntertwineResiduals hamiltonian_intertwine_check(const SpacetimeModel& model, const GeodesicState& s,
                                                        double delta) {
  model.require_in_domain(s.x);
  auto lower = [&](const Vec& x, const Vec& v) -> std::pair<Vec, Vec> { return {x, model.metric_raw(x) * v}; };
  auto diff = [&](const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b) -> std::pair<Vec, Vec> {
    return {(a.first - b.first) / (2.0 * delta), (a.second - b.second) / (2.0 * delta)};
  };
  auto maxnorm = [](const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b) {
    return std::max((a.first - b.first).cwiseAbs().maxCoeff(), (a.second - b.second).cwiseAbs().maxCoeff());
  };
  const Vec p = model.metric_raw(s.x) * s.v;
  IntertwineResiduals r;

  // Euler field: integral curve e^s v of Delta.
  const auto pushed_delta =
      diff(lower(s.x, std::exp(delta) * s.v), lower(s.x, std::exp(-delta) * s.v));
  r.r_delta = maxnorm(pushed_delta, {Vec::Zero(model.dim()), p});

  // Spray: its integral curve through (x, v) by one RK4 step each way.
  const GeodesicState fwd = rk4_step(model, s, delta);
  const GeodesicState bwd = rk4_step(model, s, -delta);
  const auto pushed_spray = diff(lower(fwd.x, fwd.v), lower(bwd.x, bwd.v));
  r.r_x = maxnorm(pushed_spray, hamiltonian_field(model, s.x, p));
  return r;
}

// Integrated form of L_E omega = omega: along the fibre scaling flow
// Phi_s(x, p) = (x, e^s p), omega at the image on pushed vectors equals
// e^s omega. Both sides are evaluated on T*M through the metric pullback.
inline double liouville_check(const SpacetimeModel& model, const GeodesicState& s, double scale, int trials = 8,
                              std::uint64_t seed = 11) {
  model.require_in_domain(s.x);
  const CounterRng rng(seed, "liouville");
  auto st = rng.stream();
  const int m = model.dim();
  const Mat g = model.metric_raw(s.x);
  const double es = std::exp(scale);
  // Pull a T*M tangent at (x, q) back to TM at (x, g^{-1} q).
  auto pull = [&](const Vec& q, const std::pair<Vec, Vec>& eta) {
    const Vec v = g.ldlt().solve(q);
    const Vec dv = g.ldlt().solve(eta.second - metric_directional(model, s.x, eta.first) * v);
    return TMTangent{s.x, v, eta.first, dv};
  };
  double r = 0.0;
  for (int k = 0; k < trials; ++k) {
    const TMTangent xi1{s.x, s.v, st.normal_vec(m), st.normal_vec(m)};
    const TMTangent xi2{s.x, s.v, st.normal_vec(m), st.normal_vec(m)};
    const auto eta1 = lower_pushforward(model, xi1);
    const auto eta2 = lower_pushforward(model, xi2);
    const Vec p = g * s.v;
    const double base = omega_g(model, pull(p, eta1), pull(p, eta2));
    const std::pair<Vec, Vec> f1{eta1.first, es * eta1.second}, f2{eta2.first, es * eta2.second};
    const double moved = omega_g(model, pull(es * p, f1), pull(es * p, f2));
    r = std::max(r, std::abs(moved - es * base));
  }
  return r;
}

}  // namespace lightrays

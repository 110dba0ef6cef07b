#pragma once

// Geodesic spray on TM, fixed-step RK4 integration with dense output, the
// exponential map, null-vector construction and the reparametrization of
// null pregeodesics to affine parameter.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lightrays/numerics.hpp"
#include "lightrays/spacetime.hpp"

namespace lightrays {

struct GeodesicState {
  Vec x;
  Vec v;
};

struct GeodesicNode {
  double t;
  Vec x;
  Vec v;
};

enum class Termination { IntervalEnd, DomainExit, ExclusionHit };

inline const char* to_string(Termination r) {
  switch (r) {
    case Termination::IntervalEnd: return "interval_end";
    case Termination::DomainExit: return "domain_exit";
    case Termination::ExclusionHit: return "exclusion_hit";
  }
  return "?";
}

// How one end of an integration stopped. `parameter` is the last node
// reached, or the closest-approach parameter to the excluded point when the
// final step was cut by a puncture.
struct EndInfo {
  Termination reason = Termination::IntervalEnd;
  double parameter = 0.0;
};

struct NullGeodesic {
  SpacetimeModel model;
  std::vector<GeodesicNode> nodes;  // ascending in t
  std::size_t base_index = 0;       // node holding the initial state
  EndInfo forward;                  // end at larger t
  EndInfo backward;                 // end at smaller t

  const GeodesicNode& base() const { return nodes[base_index]; }
  double t_min() const { return nodes.front().t; }
  double t_max() const { return nodes.back().t; }

  // Quintic Hermite interpolation using x, x' = v and x'' = -Gamma(v, v) at
  // the bracketing nodes; v is the derivative of the same interpolant.
  GeodesicState state_at(double t) const {
    if (nodes.size() == 1 || t <= nodes.front().t) return {nodes.front().x, nodes.front().v};
    if (t >= nodes.back().t) return {nodes.back().x, nodes.back().v};
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double a, const GeodesicNode& n) { return a < n.t; });
    const GeodesicNode& b = *it;
    const GeodesicNode& a = *(it - 1);
    const Vec aa = -model.christoffel_raw(a.x).contract(a.v, a.v);
    const Vec ab = -model.christoffel_raw(b.x).contract(b.v, b.v);
    auto [x, v] = hermite5<Vec>(a.t, b.t, a.x, a.v, aa, b.x, b.v, ab, t);
    return {std::move(x), std::move(v)};
  }
};

// --- spray ---------------------------------------------------------------------

struct SprayValue {
  Vec dx;
  Vec dv;
};

inline SprayValue spray_rhs_raw(const SpacetimeModel& model, const Vec& x, const Vec& v) {
  return {v, -model.christoffel_raw(x).contract(v, v)};
}

inline SprayValue spray_rhs(const SpacetimeModel& model, const GeodesicState& s) {
  model.require_in_domain(s.x);
  return spray_rhs_raw(model, s.x, s.v);
}

inline GeodesicState rk4_step(const SpacetimeModel& model, const GeodesicState& s, double h) {
  const auto k1 = spray_rhs_raw(model, s.x, s.v);
  const auto k2 = spray_rhs_raw(model, s.x + 0.5 * h * k1.dx, s.v + 0.5 * h * k1.dv);
  const auto k3 = spray_rhs_raw(model, s.x + 0.5 * h * k2.dx, s.v + 0.5 * h * k2.dv);
  const auto k4 = spray_rhs_raw(model, s.x + h * k3.dx, s.v + h * k3.dv);
  return {s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
          s.v + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
}

// Parameter in [0, 1] of the point of segment a->b closest to p.
inline double closest_approach(const Vec& a, const Vec& b, const Vec& p) {
  const Vec d = b - a;
  const double dd = d.squaredNorm();
  if (dd == 0.0) return 0.0;
  return std::clamp((p - a).dot(d) / dd, 0.0, 1.0);
}

namespace detail {

// One-directional march from (t0, p, v) with signed step h for n steps.
// Nodes come back in marching order, starting with the initial state.
inline std::vector<GeodesicNode> march(const SpacetimeModel& model, double t0, const Vec& p,
                                       const Vec& v, double h, int n, EndInfo& end) {
  std::vector<GeodesicNode> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back({t0, p, v});
  end = {Termination::IntervalEnd, t0};
  GeodesicState s{p, v};
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    GeodesicState next = rk4_step(model, s, h);
    for (const auto& q : model.excluded_points()) {
      const double u = closest_approach(s.x, next.x, q);
      if ((s.x + u * (next.x - s.x) - q).norm() <= model.tol().eps_excl) {
        end = {Termination::ExclusionHit, t + u * h};
        return out;
      }
    }
    if (!next.x.allFinite() || !model.in_box_and_predicate(next.x)) {
      end = {Termination::DomainExit, t};
      return out;
    }
    s = std::move(next);
    out.push_back({t + h, s.x, s.v});
    end.parameter = t + h;
  }
  return out;
}

}  // namespace detail

inline void require_null_future(const SpacetimeModel& model, const Vec& p, const Vec& v) {
  model.require_in_domain(p);
  if (v.size() != model.dim() || !v.allFinite()) throw NotNull("velocity has wrong size or is not finite");
  const Mat g = model.metric_raw(p);
  const double gvv = inner(g, v, v);
  if (std::abs(gvv) > model.tol().tol_null * v.squaredNorm())
    throw NotNull("g(v,v) = " + std::to_string(gvv) + " for v = " + format_point(v));
  if (!(inner(g, v, model.timelike_raw(p)) < 0.0))
    throw NotFuture("v = " + format_point(v) + " is not future directed");
}

// Spray integration without the null-cone precondition. Nodes ascend in t;
// t_span may run backwards.
inline NullGeodesic integrate_spray(const SpacetimeModel& model, const Vec& p, const Vec& v,
                                    std::pair<double, double> t_span, int n_steps) {
  model.require_in_domain(p);
  if (n_steps < kMinSteps) throw std::invalid_argument("n_steps must be at least 16");
  const auto [t0, t1] = t_span;
  NullGeodesic g{model, {}, 0, {Termination::IntervalEnd, t0}, {Termination::IntervalEnd, t0}};
  if (t0 == t1) {
    g.nodes.push_back({t0, p, v});
    return g;
  }
  const double h = (t1 - t0) / n_steps;
  EndInfo end;
  g.nodes = detail::march(model, t0, p, v, h, n_steps, end);
  if (h > 0) {
    g.forward = end;
  } else {
    g.backward = end;
    std::reverse(g.nodes.begin(), g.nodes.end());
    g.base_index = g.nodes.size() - 1;
  }
  return g;
}

inline NullGeodesic integrate_geodesic(const SpacetimeModel& model, const Vec& p, const Vec& v,
                                       std::pair<double, double> t_span, int n_steps) {
  require_null_future(model, p, v);
  return integrate_spray(model, p, v, t_span, n_steps);
}

inline int steps_for(double length, int steps_per_unit) {
  return std::max(kMinSteps, static_cast<int>(std::ceil(std::abs(length) * steps_per_unit - 1e-9)));
}

// Integration in both directions from the initial state at t = 0 over
// [t_back, t_fwd] (t_back <= 0 <= t_fwd).
inline NullGeodesic integrate_ray(const SpacetimeModel& model, const Vec& p, const Vec& v, double t_back,
                                  double t_fwd, int steps_per_unit = kDefaultStepsPerUnit) {
  if (t_back > 0.0 || t_fwd < 0.0) throw std::invalid_argument("integrate_ray needs t_back <= 0 <= t_fwd");
  require_null_future(model, p, v);
  NullGeodesic g{model, {}, 0, {Termination::IntervalEnd, 0.0}, {Termination::IntervalEnd, 0.0}};
  if (t_back < 0.0) {
    EndInfo end;
    g.nodes = detail::march(model, 0.0, p, v, t_back / steps_for(t_back, steps_per_unit),
                            steps_for(t_back, steps_per_unit), end);
    g.backward = end;
    std::reverse(g.nodes.begin(), g.nodes.end());
    g.nodes.pop_back();
  }
  g.base_index = g.nodes.size();
  if (t_fwd > 0.0) {
    EndInfo end;
    auto fwd = detail::march(model, 0.0, p, v, t_fwd / steps_for(t_fwd, steps_per_unit),
                             steps_for(t_fwd, steps_per_unit), end);
    g.forward = end;
    g.nodes.insert(g.nodes.end(), fwd.begin(), fwd.end());
  } else {
    g.nodes.push_back({0.0, p, v});
  }
  return g;
}

inline Vec exp_map(const SpacetimeModel& model, const Vec& p, const Vec& w, double t,
                   int steps_per_unit = kDefaultStepsPerUnit) {
  require_null_future(model, p, w);
  if (t == 0.0) return p;
  const NullGeodesic g = integrate_spray(model, p, w, {0.0, t}, steps_for(t, steps_per_unit));
  const EndInfo& end = t > 0 ? g.forward : g.backward;
  if (end.reason != Termination::IntervalEnd)
    throw OutOfDomain("geodesic from " + format_point(p) + " left the domain before parameter " +
                      std::to_string(t) + " (" + to_string(end.reason) + ")");
  return t > 0 ? g.nodes.back().x : g.nodes.front().x;
}

// Max over nodes of |g(v,v)| relative to |v(0)|^2.
inline double null_drift(const NullGeodesic& g) {
  const double scale = g.base().v.squaredNorm();
  double r = 0.0;
  for (const auto& n : g.nodes) r = std::max(r, std::abs(inner(g.model.metric_raw(n.x), n.v, n.v)));
  return r / scale;
}

// --- null vectors ----------------------------------------------------------------

// v = a T + b s with s the unit, T-orthogonal part of `direction`; solves
// g(v,v) = 0 and g(v,T) = -1.
inline Vec make_null_from_vector(const SpacetimeModel& model, const Vec& p, const Vec& direction) {
  const Mat g = eval_metric(model, p);
  const Vec T = model.timelike_raw(p);
  const double gTT = inner(g, T, T);
  Vec s = direction - (inner(g, direction, T) / gTT) * T;
  const double ss = inner(g, s, s);
  if (!(ss > 0.0)) throw std::invalid_argument("spatial direction degenerates against T");
  s /= std::sqrt(ss);
  const double normT = std::sqrt(-gTT);
  return T / (normT * normT) + s / normT;
}

inline Vec make_null(const SpacetimeModel& model, const Vec& p, const Vec& spatial_dir) {
  if (spatial_dir.size() != model.dim() - 1)
    throw std::invalid_argument("spatial direction must have length m-1");
  if (spatial_dir.norm() == 0.0) throw std::invalid_argument("spatial direction is zero");
  Vec u = Vec::Zero(model.dim());
  u.tail(model.dim() - 1) = spatial_dir;
  return make_null_from_vector(model, p, u);
}

// --- pregeodesics --------------------------------------------------------------

// A curve with D_t x' = f(t) x', given by samples.
struct Pregeodesic {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> xdot;
  std::vector<double> f;
};

struct Reparametrization {
  std::vector<double> h_inverse;  // affine parameter tau = h^{-1}(t) at the input samples
  NullGeodesic geodesic;          // resampled on a uniform tau grid
  double pregeodesic_residual = 0.0;
};

// max_i |D x'/dt - f x'| at interior samples, by five-point differences.
inline double pregeodesic_residual(const SpacetimeModel& model, const Pregeodesic& c) {
  const auto acc = finite_difference_derivative5<Vec>(c.t, std::span<const Vec>(c.xdot));
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < c.t.size(); ++i) {
    const Vec D = acc[i] + model.christoffel_raw(c.x[i]).contract(c.xdot[i], c.xdot[i]);
    r = std::max(r, (D - c.f[i] * c.xdot[i]).norm());
  }
  return r;
}

// Affine reparametrization h^{-1}(t) = int_0^t exp(int_0^s f) ds, with the
// origin at the first sample.
inline Reparametrization reparametrize_to_geodesic(const SpacetimeModel& model, const Pregeodesic& c) {
  const std::size_t n = c.t.size();
  if (n < 5 || c.x.size() != n || c.xdot.size() != n || c.f.size() != n)
    throw std::invalid_argument("pregeodesic needs at least 5 consistent samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(c.t[i] > c.t[i - 1])) throw std::invalid_argument("pregeodesic samples must ascend");

  double vmax = 0.0;
  for (const auto& xd : c.xdot) vmax = std::max(vmax, xd.norm());
  Reparametrization out{{}, {model, {}, 0, {}, {}}, pregeodesic_residual(model, c)};
  if (out.pregeodesic_residual > model.tol().tol_pre * (1.0 + vmax))
    throw NotPregeodesic("residual |D x' - f x'| = " + std::to_string(out.pregeodesic_residual));

  const std::vector<double> F = cumulative_integral(c.t, c.f);
  std::vector<double> E(n);
  for (std::size_t i = 0; i < n; ++i) E[i] = std::exp(F[i]);
  out.h_inverse = cumulative_integral(c.t, E);
  const auto& H = out.h_inverse;

  // Coordinate accelerations x'' = f x' - Gamma(x', x') for Hermite data.
  std::vector<Vec> xdd(n);
  for (std::size_t i = 0; i < n; ++i)
    xdd[i] = c.f[i] * c.xdot[i] - model.christoffel_raw(c.x[i]).contract(c.xdot[i], c.xdot[i]);

  const std::size_t steps = n - 1;
  const double tau_end = H.back();
  std::size_t seg = 0;
  for (std::size_t j = 0; j <= steps; ++j) {
    const double tau = tau_end * static_cast<double>(j) / static_cast<double>(steps);
    while (seg + 2 < n && H[seg + 1] < tau) ++seg;
    // t(tau) has dt/dtau = exp(-F).
    const double t = hermite3(H[seg], H[seg + 1], c.t[seg], 1.0 / E[seg], c.t[seg + 1], 1.0 / E[seg + 1], tau);
    const double a = c.t[seg], b = c.t[seg + 1];
    const Vec x = hermite3<Vec>(a, b, c.x[seg], c.xdot[seg], c.x[seg + 1], c.xdot[seg + 1], t);
    const Vec xd = hermite3<Vec>(a, b, c.xdot[seg], xdd[seg], c.xdot[seg + 1], xdd[seg + 1], t);
    const double e = hermite3(a, b, E[seg], c.f[seg] * E[seg], E[seg + 1], c.f[seg + 1] * E[seg + 1], t);
    out.geodesic.nodes.push_back({tau, x, xd / e});
  }
  out.geodesic.forward = {Termination::IntervalEnd, tau_end};
  return out;
}

// max ||D x'/dt|| over interior samples, with dv/dt by five-point differences.
inline double geodesic_residual(const SpacetimeModel& model, std::span<const GeodesicNode> samples) {
  if (samples.size() < 5) throw std::invalid_argument("geodesic_residual needs at least 5 samples");
  std::vector<double> t;
  std::vector<Vec> v;
  for (const auto& s : samples) {
    t.push_back(s.t);
    v.push_back(s.v);
  }
  const auto dv = finite_difference_derivative5<Vec>(t, std::span<const Vec>(v));
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i)
    r = std::max(r, (dv[i] + model.christoffel_raw(samples[i].x).contract(v[i], v[i])).norm());
  return r;
}

// CSV rows: t, x0..x{m-1}, v0..v{m-1}
inline void write_geodesic_csv(std::ostream& os, const NullGeodesic& g, bool header = true,
                               const std::string& prefix_col = {}) {
  const int m = g.model.dim();
  if (header) {
    if (!prefix_col.empty()) os << "ray,";
    os << "t";
    for (int i = 0; i < m; ++i) os << ",x" << i;
    for (int i = 0; i < m; ++i) os << ",v" << i;
    os << "\n";
  }
  os.precision(17);
  for (const auto& n : g.nodes) {
    if (!prefix_col.empty()) os << prefix_col << ",";
    os << n.t;
    for (int i = 0; i < m; ++i) os << "," << n.x[i];
    for (int i = 0; i < m; ++i) os << "," << n.v[i];
    os << "\n";
  }
}

}  // namespace lightrays

#pragma once

// Jacobi fields along null geodesics, the light-ray subspace (g(J, gamma')
// constant) and canonical representatives of classes modulo (a + bt) gamma'.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "lightrays/geodesics.hpp"

namespace lightrays {

struct JacobiInit {
  Vec J0;
  Vec J0dot;
};

struct JacobiSample {
  double t;
  Vec J;
  Vec Jdot;  // covariant derivative DJ/dt
};

namespace detail {

// Generator of the first-order Jacobi system along the base at (x, v):
//   dJ/dt = P - Gamma(v, J),  dP/dt = -R(J, v)v - Gamma(v, P).
inline Mat jacobi_generator(const SpacetimeModel& model, const Vec& x, const Vec& v) {
  const int m = model.dim();
  const Mat Gv = christoffel_matrix(model.christoffel_raw(x), v);
  Mat A = Mat::Zero(2 * m, 2 * m);
  A.topLeftCorner(m, m) = -Gv;
  A.topRightCorner(m, m) = Mat::Identity(m, m);
  A.bottomLeftCorner(m, m) = -riemann_matrix_raw(model, x, v);
  A.bottomRightCorner(m, m) = -Gv;
  return A;
}

}  // namespace detail

// (model, x, v) -> 2m x 2m generator; replaceable for mutation testing.
using JacobiGenerator = std::function<Mat(const SpacetimeModel&, const Vec&, const Vec&)>;

struct JacobiField {
  std::shared_ptr<const NullGeodesic> geodesic;
  std::vector<JacobiSample> samples;  // co-gridded with geodesic->nodes

  const JacobiSample& base() const { return samples[geodesic->base_index]; }

  // Cubic Hermite interpolation in t using the coordinate derivatives of
  // (J, P) from the Jacobi system.
  JacobiSample at(double t) const {
    const auto& nodes = geodesic->nodes;
    if (samples.size() == 1 || t <= samples.front().t) return samples.front();
    if (t >= samples.back().t) return samples.back();
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double a, const JacobiSample& s) { return a < s.t; });
    const std::size_t i1 = static_cast<std::size_t>(it - samples.begin());
    const std::size_t i0 = i1 - 1;
    const int m = geodesic->model.dim();
    auto pack = [&](std::size_t i) {
      Vec y(2 * m);
      y << samples[i].J, samples[i].Jdot;
      return y;
    };
    const Vec y0 = pack(i0), y1 = pack(i1);
    const Vec d0 = detail::jacobi_generator(geodesic->model, nodes[i0].x, nodes[i0].v) * y0;
    const Vec d1 = detail::jacobi_generator(geodesic->model, nodes[i1].x, nodes[i1].v) * y1;
    const Vec y = hermite3<Vec>(samples[i0].t, samples[i1].t, y0, d0, y1, d1, t);
    return {t, y.head(m), y.tail(m)};
  }
};

// RK4 on the geodesic's own grid; the half-step base states come from the
// geodesic's dense output, so the base is never re-integrated.
inline JacobiField integrate_jacobi(std::shared_ptr<const NullGeodesic> geo, const JacobiInit& init,
                                    const JacobiGenerator& generator = detail::jacobi_generator) {
  const int m = geo->model.dim();
  if (geo->nodes.empty()) throw GridMismatch("geodesic has no nodes");
  if (init.J0.size() != m || init.J0dot.size() != m)
    throw GridMismatch("initial data has dimension " + std::to_string(init.J0.size()) + ", geodesic has " +
                       std::to_string(m));
  if (!init.J0.allFinite() || !init.J0dot.allFinite()) throw GridMismatch("initial data not finite");
  const auto& nodes = geo->nodes;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i].t > nodes[i - 1].t)) throw GridMismatch("geodesic nodes are not strictly ascending");

  const std::size_t n = nodes.size();
  const std::size_t b = geo->base_index;
  std::vector<Vec> y(n);
  y[b].resize(2 * m);
  y[b] << init.J0, init.J0dot;

  std::vector<Mat> A(n);
  for (std::size_t i = 0; i < n; ++i) A[i] = generator(geo->model, nodes[i].x, nodes[i].v);

  auto step = [&](std::size_t from, std::size_t to) {
    const double h = nodes[to].t - nodes[from].t;
    const GeodesicState mid = geo->state_at(nodes[from].t + 0.5 * h);
    const Mat& A0 = A[from];
    const Mat Am = generator(geo->model, mid.x, mid.v);
    const Mat& A1 = A[to];
    const Vec& y0 = y[from];
    const Vec k1 = A0 * y0;
    const Vec k2 = Am * (y0 + 0.5 * h * k1);
    const Vec k3 = Am * (y0 + 0.5 * h * k2);
    const Vec k4 = A1 * (y0 + h * k3);
    y[to] = y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  for (std::size_t i = b; i + 1 < n; ++i) step(i, i + 1);
  for (std::size_t i = b; i > 0; --i) step(i, i - 1);

  JacobiField field{std::move(geo), {}};
  field.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) field.samples.push_back({nodes[i].t, y[i].head(m), y[i].tail(m)});
  return field;
}

inline JacobiField integrate_jacobi(const NullGeodesic& geo, const JacobiInit& init,
                                    const JacobiGenerator& generator = detail::jacobi_generator) {
  return integrate_jacobi(std::make_shared<const NullGeodesic>(geo), init, generator);
}

// --- variation oracle -----------------------------------------------------------

struct VariationOracle {
  std::vector<double> t;
  std::vector<Vec> J;  // [x(ds, t) - x(-ds, t)] / (2 ds)
  Vec lambda_prime;    // J(0)
  Vec DW_ds;           // J'(0)
};

// Five-point central derivative at s = 0.
template <class F>
Vec derivative_at_zero(F&& f, double h) {
  return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h);
}

// Jacobi field of x(s, t) = exp_{lambda(s)}(t W(s)) by central differences in s.
inline VariationOracle variation_jacobi_oracle(const SpacetimeModel& model,
                                               const std::function<Vec(double)>& lambda,
                                               const std::function<Vec(double)>& W, double ds,
                                               std::pair<double, double> t_span, int n_steps) {
  const NullGeodesic plus = integrate_geodesic(model, lambda(ds), W(ds), t_span, n_steps);
  const NullGeodesic minus = integrate_geodesic(model, lambda(-ds), W(-ds), t_span, n_steps);
  VariationOracle out;
  const std::size_t n = std::min(plus.nodes.size(), minus.nodes.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.t.push_back(plus.nodes[i].t);
    out.J.push_back((plus.nodes[i].x - minus.nodes[i].x) / (2.0 * ds));
  }
  const double h = 1e-3;
  out.lambda_prime = derivative_at_zero(lambda, h);
  const Vec dW = derivative_at_zero(W, h);
  out.DW_ds = dW + model.christoffel_raw(lambda(0.0)).contract(out.lambda_prime, W(0.0));
  return out;
}

// --- pairing g(J, gamma') = a + b t ----------------------------------------------

struct PairingFit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
};

inline std::vector<double> pairing_values(const JacobiField& J) {
  std::vector<double> y;
  y.reserve(J.samples.size());
  const auto& nodes = J.geodesic->nodes;
  for (std::size_t i = 0; i < J.samples.size(); ++i)
    y.push_back(inner(J.geodesic->model.metric_raw(nodes[i].x), J.samples[i].J, nodes[i].v));
  return y;
}

inline PairingFit affine_pairing_fit(const JacobiField& J) {
  const std::size_t n = J.samples.size();
  if (n < 8) throw std::invalid_argument("affine_pairing_fit needs at least 8 samples");
  const std::vector<double> y = pairing_values(J);
  // Centered least squares for numerical stability.
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tm += J.samples[i].t;
    ym += y[i];
  }
  tm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = J.samples[i].t - tm;
    stt += dt * dt;
    sty += dt * (y[i] - ym);
  }
  PairingFit fit;
  fit.b = stt > 0 ? sty / stt : 0.0;
  fit.a = ym - fit.b * tm;
  for (std::size_t i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.a + fit.b * J.samples[i].t)));
  return fit;
}

inline bool is_lightray_jacobi(const JacobiField& J, double tol) {
  return std::abs(affine_pairing_fit(J).b) <= tol;
}

inline bool is_lightray_jacobi(const JacobiField& J) {
  const PairingFit fit = affine_pairing_fit(J);
  return std::abs(fit.b) <= J.geodesic->model.tol().tol_lightray * (1.0 + std::abs(fit.a));
}

// --- classes modulo gamma' ----------------------------------------------------------

// Class [J] in L(gamma), stored by its representative with initial data
// g-orthogonal to T at the base event, where g(v, T) = -1.
struct JacobiClass {
  SpacetimeModel model;
  Vec x;     // base event
  Vec v;     // normalized velocity at the base
  Vec w;     // J(0) component in T-perp
  Vec wdot;  // J'(0) component in T-perp
};

// Decomposes J0 = c1 v + w, J0dot = c2 v + wdot with w, wdot in T-perp.
// When `normalize` is set, the parameter is first rescaled so that the
// velocity satisfies g(v, T) = -1 (which rescales J' by the same factor).
inline JacobiClass reduce_at(const SpacetimeModel& model, const Vec& x, const Vec& v, const Vec& J0,
                             const Vec& J0dot, bool normalize) {
  const Mat g = model.metric_raw(x);
  const Vec T = model.timelike_raw(x);
  double scale = 1.0;
  Vec vn = v;
  if (normalize) {
    scale = -1.0 / inner(g, v, T);
    vn = scale * v;
  }
  const double gvT = inner(g, vn, T);
  const Vec w = J0 - (inner(g, J0, T) / gvT) * vn;
  const Vec Jd = scale * J0dot;
  const Vec wdot = Jd - (inner(g, Jd, T) / gvT) * vn;
  return {model, x, vn, w, wdot};
}

inline JacobiClass mod_gamma_reduce(const NullGeodesic& geo, const JacobiInit& init) {
  const auto& base = geo.base();
  const SpacetimeModel& model = geo.model;
  const Mat g = model.metric_raw(base.x);
  const Vec T = model.timelike_raw(base.x);
  const double gvT = inner(g, base.v, T);
  if (std::abs(gvT + 1.0) > model.tol().tol_normalized)
    throw NotNormalized("g(v, T) = " + std::to_string(gvT) + " at the base event");
  const double a = inner(g, init.J0, base.v);
  const double b = inner(g, init.J0dot, base.v);
  if (std::abs(b) > model.tol().tol_lightray * (1.0 + std::abs(a)))
    throw NotLightRayField("g(J', gamma') = " + std::to_string(b) + " is not zero");
  return reduce_at(model, base.x, base.v, init.J0, init.J0dot, false);
}

inline void require_same_base(const JacobiClass& c1, const JacobiClass& c2) {
  const double tol = 1e-9;
  if (c1.x.size() != c2.x.size() || (c1.x - c2.x).norm() > tol * (1.0 + c1.x.norm()) ||
      (c1.v - c2.v).norm() > tol * (1.0 + c1.v.norm()))
    throw BaseMismatch("classes live over different base rays: " + format_point(c1.x) + " vs " +
                       format_point(c2.x));
}

inline double class_distance(const JacobiClass& c1, const JacobiClass& c2) {
  require_same_base(c1, c2);
  return std::max((c1.w - c2.w).norm(), (c1.wdot - c2.wdot).norm());
}

// CSV rows: t, J0..J{m-1}, Jd0..Jd{m-1}, pairing
inline void write_jacobi_csv(std::ostream& os, const JacobiField& J, bool header = true,
                             const std::string& prefix_col = {}) {
  const int m = J.geodesic->model.dim();
  if (header) {
    if (!prefix_col.empty()) os << "field,";
    os << "t";
    for (int i = 0; i < m; ++i) os << ",J" << i;
    for (int i = 0; i < m; ++i) os << ",Jd" << i;
    os << ",pairing\n";
  }
  const std::vector<double> pairing = pairing_values(J);
  os.precision(17);
  for (std::size_t k = 0; k < J.samples.size(); ++k) {
    const auto& s = J.samples[k];
    if (!prefix_col.empty()) os << prefix_col << ",";
    os << s.t;
    for (int i = 0; i < m; ++i) os << "," << s.J[i];
    for (int i = 0; i < m; ++i) os << "," << s.Jdot[i];
    os << "," << pairing[k] << "\n";
  }
}

}  // namespace lightrays

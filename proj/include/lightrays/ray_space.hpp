#pragma once

// Charts of the space of light rays over a globally hyperbolic coordinate box
// V with Cauchy slice C = {x^0 = c0}: rays are represented by their crossing
// event on C and the future null velocity normalized by g(v, T) = -1.

#include <cmath>
#include <functional>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lightrays/jacobi.hpp"

namespace lightrays {

struct Frame {
  Vec T_hat;            // unit future timelike
  std::vector<Vec> e;   // orthonormal spatial legs, e[0] from the x^1 direction
  double T_norm = 1.0;  // sqrt(-g(T, T))
};

class CauchyChart {
 public:
  CauchyChart(SpacetimeModel model, Box V, double c0) : model_(std::move(model)), V_(std::move(V)), c0_(c0) {}

  const SpacetimeModel& model() const { return model_; }
  const Box& V() const { return V_; }
  double c0() const { return c0_; }
  int dim() const { return model_.dim(); }

  Vec event(const Vec& q) const {
    Vec x(dim());
    x[0] = c0_;
    x.tail(dim() - 1) = q;
    return x;
  }

  bool on_slice_in_V(const Vec& q) const { return V_.contains(event(q)) && model_.in_domain(event(q)); }

  // Gram-Schmidt under g of (T, d_1, ..., d_{m-1}) at the event.
  Frame frame(const Vec& x) const {
    const int m = dim();
    const Mat g = model_.metric_raw(x);
    const Vec T = model_.timelike_raw(x);
    Frame f;
    f.T_norm = std::sqrt(-inner(g, T, T));
    f.T_hat = T / f.T_norm;
    for (int i = 1; i < m; ++i) {
      Vec u = Vec::Unit(m, i);
      u += inner(g, u, f.T_hat) * f.T_hat;
      for (const auto& ej : f.e) u -= inner(g, u, ej) * ej;
      f.e.push_back(u / std::sqrt(inner(g, u, u)));
    }
    return f;
  }

 private:
  SpacetimeModel model_;
  Box V_;
  double c0_;
};

// Spacelike check on a 10^(m-1) grid of slice points and frame setup.
inline CauchyChart build_chart(const SpacetimeModel& model, const Box& V, double c0) {
  const int m = model.dim();
  if (V.lo.size() != m || V.hi.size() != m) throw SliceOutsideBox("chart box has the wrong dimension");
  if (!model.domain().contains(V)) throw SliceOutsideBox("chart box is not inside the model domain");
  if (!(c0 > V.lo[0] && c0 < V.hi[0]))
    throw SliceOutsideBox("slice x0 = " + std::to_string(c0) + " is not inside the chart box");
  const int per_axis = 10;
  const int total = static_cast<int>(std::pow(per_axis, m - 1));
  for (int idx = 0; idx < total; ++idx) {
    Vec x(m);
    x[0] = c0;
    int r = idx;
    for (int a = 1; a < m; ++a) {
      const int k = r % per_axis;
      r /= per_axis;
      x[a] = V.lo[a] + (V.hi[a] - V.lo[a]) * (k + 0.5) / per_axis;
    }
    if (!model.in_domain(x)) continue;
    const Mat g = model.metric_raw(x);
    const Mat induced = g.bottomRightCorner(m - 1, m - 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(induced, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw NotSpacelike("slice x0 = " + std::to_string(c0) + " is not spacelike at " + format_point(x));
  }
  return CauchyChart(model, V, c0);
}

// A point of the chart: crossing event q on C and v in Omega^T(C).
struct LightRay {
  std::shared_ptr<const CauchyChart> chart;
  Vec q;  // m-1 surface coordinates
  Vec v;  // g(v, v) = 0, g(v, T) = -1, future

  Vec event() const { return chart->event(q); }
  const SpacetimeModel& model() const { return chart->model(); }
};

inline LightRay make_light_ray(std::shared_ptr<const CauchyChart> chart, const Vec& q, const Vec& v) {
  const SpacetimeModel& model = chart->model();
  if (q.size() != chart->dim() - 1) throw std::invalid_argument("surface point must have m-1 coordinates");
  if (!chart->on_slice_in_V(q)) throw OutOfDomain("surface point " + format_point(q) + " is not in C within V");
  const Vec x = chart->event(q);
  const Mat g = model.metric_raw(x);
  const double gvv = inner(g, v, v);
  const double gvT = inner(g, v, model.timelike_raw(x));
  const double tol = model.tol().tol_normalized;
  if (std::abs(gvv) > tol) throw NotNull("light ray velocity has g(v,v) = " + std::to_string(gvv));
  if (std::abs(gvT + 1.0) > tol) throw NotNormalized("light ray velocity has g(v,T) = " + std::to_string(gvT));
  return {std::move(chart), q, v};
}

// --- rays <-> chart -------------------------------------------------------------------

// Parameter where x^0 = c0 along the stored trajectory: sign changes of
// x^0 - c0 over the nodes locate the segment, then bisection on the dense
// output to 1e-13 and one Newton polish.
inline double crossing_parameter(const NullGeodesic& geo, double c0) {
  const auto& nodes = geo.nodes;
  int crossings = 0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double f0 = nodes[i].x[0] - c0, f1 = nodes[i + 1].x[0] - c0;
    if ((f0 < 0.0 && f1 >= 0.0) || (f0 > 0.0 && f1 <= 0.0) || (f0 == 0.0 && i == 0)) {
      if (f0 == 0.0 && f1 == 0.0) continue;
      ++crossings;
      seg = i;
    }
  }
  if (nodes.size() == 1 && nodes[0].x[0] == c0) return nodes[0].t;
  if (crossings == 0)
    throw NoCrossing("geodesic does not reach x0 = " + std::to_string(c0) + " on its stored nodes");
  if (crossings > 1)
    throw MultipleCrossings("geodesic crosses x0 = " + std::to_string(c0) + " " + std::to_string(crossings) +
                            " times");
  double a = nodes[seg].t, b = nodes[seg + 1].t;
  double fa = nodes[seg].x[0] - c0;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = geo.state_at(mid).x[0] - c0;
    if ((fa <= 0.0) == (fm <= 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  double t_star = 0.5 * (a + b);
  const GeodesicState s = geo.state_at(t_star);
  if (s.v[0] != 0.0) t_star -= (s.x[0] - c0) / s.v[0];
  return t_star;
}

inline LightRay ray_to_chart(std::shared_ptr<const CauchyChart> chart, const NullGeodesic& geo) {
  const double t_star = crossing_parameter(geo, chart->c0());
  const GeodesicState s = geo.state_at(t_star);
  const Vec x = s.x;
  const Vec q = x.tail(chart->dim() - 1);
  if (!chart->V().contains(chart->event(q)))
    throw NoCrossing("crossing event " + format_point(x) + " lies outside the chart box");
  const SpacetimeModel& model = chart->model();
  const Vec xe = chart->event(q);
  const double gvT = inner(model.metric_raw(xe), s.v, model.timelike_raw(xe));
  return make_light_ray(std::move(chart), q, s.v / (-gvT));
}

inline NullGeodesic chart_to_ray(const LightRay& ray, std::pair<double, double> t_span,
                                 int steps_per_unit = kDefaultStepsPerUnit) {
  return integrate_ray(ray.model(), ray.event(), ray.v, t_span.first, t_span.second, steps_per_unit);
}

// --- coordinates ----------------------------------------------------------------------

// (m-1 surface coordinates) + (m-2 hyperspherical angles of the spatial unit
// vector in the chart frame). For m = 2 there are no angles and the two null
// directions are told apart by `orientation`.
struct RayCoords {
  Vec values;
  int orientation = 1;
};

inline int ray_coords_size(int m) { return 2 * m - 3; }

inline Vec spatial_unit_components(const CauchyChart& chart, const Vec& x, const Vec& v) {
  const Frame f = chart.frame(x);
  const Mat g = chart.model().metric_raw(x);
  Vec s(chart.dim() - 1);
  for (int i = 0; i < s.size(); ++i) s[i] = f.T_norm * inner(g, v, f.e[static_cast<std::size_t>(i)]);
  return s;
}

inline RayCoords ray_coords(const LightRay& ray) {
  const int m = ray.chart->dim();
  const Vec s = spatial_unit_components(*ray.chart, ray.event(), ray.v);
  RayCoords c;
  c.values.resize(ray_coords_size(m));
  c.values.head(m - 1) = ray.q;
  if (m == 2) {
    c.orientation = s[0] >= 0.0 ? 1 : -1;
    return c;
  }
  const int n = m - 1;  // length of s
  for (int k = 0; k + 2 < n; ++k) {
    const double tail = s.tail(n - k).norm();
    c.values[m - 1 + k] = std::acos(std::clamp(s[k] / tail, -1.0, 1.0));
  }
  c.values[2 * m - 4] = std::atan2(s[n - 1], s[n - 2]);
  return c;
}

inline Vec angles_to_unit(const Vec& angles) {
  const int n = static_cast<int>(angles.size()) + 1;
  Vec s(n);
  double sin_prod = 1.0;
  for (int k = 0; k + 2 < n; ++k) {
    s[k] = sin_prod * std::cos(angles[k]);
    sin_prod *= std::sin(angles[k]);
  }
  s[n - 2] = sin_prod * std::cos(angles[n - 2]);
  s[n - 1] = sin_prod * std::sin(angles[n - 2]);
  return s;
}

inline LightRay coords_to_ray(std::shared_ptr<const CauchyChart> chart, const RayCoords& c) {
  const int m = chart->dim();
  if (c.values.size() != ray_coords_size(m))
    throw std::invalid_argument("ray coordinates must have length 2m-3");
  const Vec q = c.values.head(m - 1);
  const Vec x = chart->event(q);
  Vec s;
  if (m == 2) {
    s = Vec::Constant(1, c.orientation >= 0 ? 1.0 : -1.0);
  } else {
    s = angles_to_unit(c.values.tail(m - 2));
  }
  const Frame f = chart->frame(x);
  Vec dir = Vec::Zero(m);
  for (int i = 0; i < m - 1; ++i) dir += s[i] * f.e[static_cast<std::size_t>(i)];
  const Vec v = make_null_from_vector(chart->model(), x, dir);
  return make_light_ray(std::move(chart), q, v);
}

// Wraps angle differences into (-pi, pi] so coordinates can be compared.
inline double coords_distance(const RayCoords& a, const RayCoords& b, int m) {
  double d = 0.0;
  for (int i = 0; i < a.values.size(); ++i) {
    double diff = a.values[i] - b.values[i];
    if (i == 2 * m - 4 && m > 2) diff = std::remainder(diff, 2.0 * std::numbers::pi);
    d = std::max(d, std::abs(diff));
  }
  if (a.orientation != b.orientation) d = std::max(d, 2.0);
  return d;
}

// --- tangent vectors ------------------------------------------------------------------

// Initial data (J(0), J'(0)) of x(s, t) = exp_{alpha(s)}(t u(s)):
// J(0) = alpha'(0), J'(0) = du/ds + Gamma(alpha', u). Central differences
// with one Richardson step (fourth order in ds).
inline JacobiInit variation_initial_data(const SpacetimeModel& model, const std::function<Vec(double)>& alpha,
                                         const std::function<Vec(double)>& u, double ds) {
  auto central = [&](const std::function<Vec(double)>& f, double h) { return Vec((f(h) - f(-h)) / (2.0 * h)); };
  const Vec da = (4.0 * central(alpha, 0.5 * ds) - central(alpha, ds)) / 3.0;
  const Vec du = (4.0 * central(u, 0.5 * ds) - central(u, ds)) / 3.0;
  const Vec x0 = alpha(0.0);
  return {da, du + model.christoffel_raw(x0).contract(da, u(0.0))};
}

// Tangent of a curve of rays at s = 0 as a class in L(gamma).
inline JacobiClass tangent_from_ray_curve(const std::function<LightRay(double)>& curve, double ds = 1e-3) {
  const LightRay r0 = curve(0.0);
  const SpacetimeModel& model = r0.model();
  const JacobiInit init = variation_initial_data(
      model, [&](double s) { return curve(s).event(); }, [&](double s) { return curve(s).v; }, ds);
  const NullGeodesic base = chart_to_ray(r0, {0.0, 0.0});
  return mod_gamma_reduce(base, init);
}

// s -> ray with coordinates c0 + s * direction.
inline std::function<LightRay(double)> coordinate_curve(std::shared_ptr<const CauchyChart> chart,
                                                        const RayCoords& c0, const Vec& direction) {
  return [chart = std::move(chart), c0, direction](double s) {
    RayCoords c = c0;
    c.values += s * direction;
    return coords_to_ray(chart, c);
  };
}

// --- CSV ---------------------------------------------------------------------------------

inline void write_rays_csv(std::ostream& os, const std::vector<RayCoords>& rays, int m) {
  for (int i = 0; i < m - 1; ++i) os << (i ? "," : "") << "q" << i + 1;
  for (int i = 0; i < m - 2; ++i) os << ",a" << i + 1;
  if (m == 2) os << ",orientation";
  os << "\n";
  os.precision(17);
  for (const auto& r : rays) {
    for (int i = 0; i < r.values.size(); ++i) os << (i ? "," : "") << r.values[i];
    if (m == 2) os << "," << r.orientation;
    os << "\n";
  }
}

inline std::vector<RayCoords> read_rays_csv(std::istream& is, int m) {
  std::vector<RayCoords> out;
  std::string line;
  if (!std::getline(is, line)) return out;  // header
  const int n = ray_coords_size(m);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("rays csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    const std::size_t expected = static_cast<std::size_t>(n + (m == 2 ? 1 : 0));
    if (vals.size() != expected)
      throw ParseError("rays csv line " + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                       " columns");
    RayCoords r;
    r.values = Eigen::Map<Vec>(vals.data(), n);
    if (m == 2) r.orientation = vals.back() >= 0 ? 1 : -1;
    out.push_back(r);
  }
  return out;
}

}  // namespace lightrays

#pragma once

// Lorentzian metrics in a conformal class: g = exp(2 sigma) g0 on an
// axis-aligned coordinate box, together with a global future timelike field.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lightrays/errors.hpp"
#include "lightrays/expression.hpp"
#include "lightrays/tolerances.hpp"

namespace lightrays {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::string format_point(const Vec& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

struct Box {
  Vec lo;
  Vec hi;

  static Box cube(int m, double half_width) {
    return {Vec::Constant(m, -half_width), Vec::Constant(m, half_width)};
  }
  bool contains(const Vec& x) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }
  bool contains(const Box& inner) const {
    return contains(inner.lo) && contains(inner.hi);
  }
};

// Gamma^k_ij stored densely, k major.
class Christoffel {
 public:
  explicit Christoffel(int m) : m_(m), c_(static_cast<std::size_t>(m * m * m), 0.0) {}

  int dim() const { return m_; }
  double& operator()(int k, int i, int j) { return c_[idx(k, i, j)]; }
  double operator()(int k, int i, int j) const { return c_[idx(k, i, j)]; }

  // (Gamma(a, b))^k = Gamma^k_ij a^i b^j
  Vec contract(const Vec& a, const Vec& b) const {
    Vec out = Vec::Zero(m_);
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (a[i] == 0.0) continue;
        for (int j = 0; j < m_; ++j) s += (*this)(k, i, j) * a[i] * b[j];
      }
      out[k] = s;
    }
    return out;
  }

  double max_abs() const {
    double r = 0.0;
    for (double v : c_) r = std::max(r, std::abs(v));
    return r;
  }

  Christoffel& operator-=(const Christoffel& o) {
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
    return *this;
  }
  Christoffel& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend Christoffel operator-(Christoffel a, const Christoffel& b) { return a -= b; }

 private:
  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * m_ + i) * m_ + j);
  }
  int m_;
  std::vector<double> c_;
};

// A smooth scalar with an optional analytic gradient.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;  // empty when only values are known
  std::string label;

  static ScalarField zero() {
    return {[](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec::Zero(x.size()); }, "0"};
  }
  static ScalarField from_expression(const Expression& e) {
    return {[e](const Vec& x) { return e(x); }, [e](const Vec& x) { return e.gradient(x); },
            e.to_string()};
  }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  ScalarField s;
  s.value = [fa = a.value, fb = b.value](const Vec& x) { return fa(x) + fb(x); };
  if (a.has_gradient() && b.has_gradient())
    s.gradient = [ga = a.gradient, gb = b.gradient](const Vec& x) -> Vec { return ga(x) + gb(x); };
  s.label = "(" + a.label + ")+(" + b.label + ")";
  return s;
}

struct MetricField {
  int dim = 0;
  std::function<Mat(const Vec&)> base;  // g0
  bool flat_base = false;               // g0 constant in the chart
  ScalarField sigma = ScalarField::zero();
  // Analytic Christoffel symbols of exp(2 sigma) g0, when known.
  std::function<Christoffel(const Vec&)> christoffel;
};

struct ModelData {
  std::string name;
  std::string kind;
  MetricField metric;
  Box domain;
  std::function<bool(const Vec&)> domain_predicate;  // extra open condition, may be empty
  std::string domain_description;
  std::function<Vec(const Vec&)> timelike;
  std::vector<Vec> excluded_points;
  Tolerances tol = kDefaultTolerances;
};

// Immutable, cheap to copy.
class SpacetimeModel {
 public:
  explicit SpacetimeModel(ModelData data) : d_(std::make_shared<const ModelData>(std::move(data))) {
    for (const auto& p : d_->excluded_points)
      if (!d_->domain.contains(p))
        throw ModelError("excluded point " + format_point(p) + " outside the domain of " + d_->name);
  }

  const ModelData& data() const { return *d_; }
  const std::string& name() const { return d_->name; }
  const std::string& kind() const { return d_->kind; }
  int dim() const { return d_->metric.dim; }
  const Box& domain() const { return d_->domain; }
  const Tolerances& tol() const { return d_->tol; }
  const MetricField& metric() const { return d_->metric; }
  const std::vector<Vec>& excluded_points() const { return d_->excluded_points; }

  bool in_box_and_predicate(const Vec& x) const {
    if (!d_->domain.contains(x)) return false;
    return !d_->domain_predicate || d_->domain_predicate(x);
  }

  bool in_domain(const Vec& x) const {
    if (!in_box_and_predicate(x)) return false;
    for (const auto& p : d_->excluded_points)
      if ((x - p).norm() <= d_->tol.eps_excl) return false;
    return true;
  }

  void require_in_domain(const Vec& x) const {
    if (x.size() != dim())
      throw OutOfDomain("point of dimension " + std::to_string(x.size()) + " in model " + name() +
                        " of dimension " + std::to_string(dim()));
    if (!x.allFinite()) throw OutOfDomain("non-finite point " + format_point(x));
    if (!in_domain(x)) throw OutOfDomain(format_point(x) + " is outside the domain of " + name());
  }

  // Metric components without domain or signature checks; for integrator
  // stages and finite-difference stencils that may straddle the box edge.
  Mat metric_raw(const Vec& x) const {
    const auto& m = d_->metric;
    return std::exp(2.0 * m.sigma.value(x)) * m.base(x);
  }

  Vec timelike_raw(const Vec& x) const { return d_->timelike(x); }

  Christoffel christoffel_raw(const Vec& x) const {
    if (d_->metric.christoffel) return d_->metric.christoffel(x);
    return christoffel_fd(x, d_->tol.h_fd);
  }

  // Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij), derivatives by
  // central differences with step h.
  Christoffel christoffel_fd(const Vec& x, double h) const {
    const int m = dim();
    std::vector<Mat> dg(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) {
      Vec xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      dg[static_cast<std::size_t>(l)] = (metric_raw(xp) - metric_raw(xm)) / (2.0 * h);
    }
    const Mat ginv = metric_raw(x).inverse();
    Christoffel G(m);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          double s = 0.0;
          for (int l = 0; l < m; ++l)
            s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](l, j) +
                               dg[static_cast<std::size_t>(j)](l, i) -
                               dg[static_cast<std::size_t>(l)](i, j));
          G(k, i, j) = G(k, j, i) = 0.5 * s;
        }
    return G;
  }

 private:
  std::shared_ptr<const ModelData> d_;
};

// --- evaluation --------------------------------------------------------------

inline void check_lorentzian(const Mat& g, const Vec& x) {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ModelError("metric not symmetric at " + format_point(x));
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  int negative = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (std::abs(ev) <= 1e-14 * scale) throw ModelError("degenerate metric at " + format_point(x));
    if (ev < 0) ++negative;
  }
  if (negative != 1)
    throw ModelError("metric signature has " + std::to_string(negative) +
                     " negative eigenvalues at " + format_point(x));
}

inline Mat eval_metric(const SpacetimeModel& model, const Vec& x) {
  model.require_in_domain(x);
  Mat g = model.metric_raw(x);
  check_lorentzian(g, x);
  return g;
}

inline Vec timelike_field(const SpacetimeModel& model, const Vec& x) {
  model.require_in_domain(x);
  return model.timelike_raw(x);
}

inline Christoffel christoffel(const SpacetimeModel& model, const Vec& x) {
  model.require_in_domain(x);
  return model.christoffel_raw(x);
}

inline double inner(const Mat& g, const Vec& a, const Vec& b) { return a.dot(g * b); }

// Directional derivative of the Christoffel symbols, (d_dir Gamma)^k_ij.
inline Christoffel christoffel_directional(const SpacetimeModel& model, const Vec& x,
                                           const Vec& dir) {
  const double n = dir.norm();
  Christoffel out(model.dim());
  if (n == 0.0) return out;
  const double h = model.tol().h_fd;
  const Vec u = dir / n;
  out = model.christoffel_raw(x + h * u) - model.christoffel_raw(x - h * u);
  out *= n / (2.0 * h);
  return out;
}

// R(J, v)v with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
// so the Jacobi equation reads J'' + R(J, v)v = 0.
inline Vec riemann_op_raw(const SpacetimeModel& model, const Vec& x, const Vec& J, const Vec& v) {
  const Christoffel G = model.christoffel_raw(x);
  const Christoffel dJ = christoffel_directional(model, x, J);
  const Christoffel dv = christoffel_directional(model, x, v);
  return dJ.contract(v, v) - dv.contract(J, v) + G.contract(J, G.contract(v, v)) -
         G.contract(v, G.contract(J, v));
}

// Matrix of the linear map J -> R(J, v)v at x (columns are R(e_i, v)v).
inline Mat riemann_matrix_raw(const SpacetimeModel& model, const Vec& x, const Vec& v) {
  const int m = model.dim();
  const double h = model.tol().h_fd;
  const Christoffel G = model.christoffel_raw(x);
  const Christoffel dv = christoffel_directional(model, x, v);
  const Vec Gvv = G.contract(v, v);
  Mat R(m, m);
  for (int i = 0; i < m; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    Christoffel di = model.christoffel_raw(xp) - model.christoffel_raw(xm);
    di *= 1.0 / (2.0 * h);
    const Vec e = Vec::Unit(m, i);
    R.col(i) = di.contract(v, v) - dv.contract(e, v) + G.contract(e, Gvv) - G.contract(v, G.contract(e, v));
  }
  return R;
}

// Matrix of X -> Gamma(v, X).
inline Mat christoffel_matrix(const Christoffel& G, const Vec& v) {
  const int m = G.dim();
  Mat A = Mat::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(k, j) += G(k, i, j) * v[i];
  return A;
}

inline Vec riemann_op(const SpacetimeModel& model, const Vec& x, const Vec& J, const Vec& v) {
  model.require_in_domain(x);
  return riemann_op_raw(model, x, J, v);
}

inline Vec lower_index(const SpacetimeModel& model, const Vec& x, const Vec& v) {
  return eval_metric(model, x) * v;
}

inline Vec raise_index(const SpacetimeModel& model, const Vec& x, const Vec& p) {
  return eval_metric(model, x).ldlt().solve(p);
}

// --- conformal class ----------------------------------------------------------

// Gamma of exp(2 sigma) g0 for constant g0:
//   delta^k_i d_j sigma + delta^k_j d_i sigma - g0_ij g0^kl d_l sigma
inline std::function<Christoffel(const Vec&)> conformal_flat_christoffel(const Mat& g0,
                                                                         ScalarField sigma) {
  const Mat g0inv = g0.inverse();
  return [g0, g0inv, sigma = std::move(sigma)](const Vec& x) {
    const int m = static_cast<int>(g0.rows());
    const Vec ds = sigma.gradient(x);
    const Vec up = g0inv * ds;
    Christoffel G(m);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          G(k, i, j) = (k == i ? ds[j] : 0.0) + (k == j ? ds[i] : 0.0) - g0(i, j) * up[k];
    return G;
  };
}

// Metric exp(2 sigma) g with the same domain and timelike field. Exponents
// add, so repeated rescalings compose exactly.
inline SpacetimeModel conformal_rescale(const SpacetimeModel& model, const ScalarField& sigma) {
  ModelData d = model.data();
  d.metric.sigma = d.metric.sigma + sigma;
  d.name = model.name() + "*exp(2*" + sigma.label + ")";
  d.kind = "conformal_rescale";
  if (d.metric.flat_base && d.metric.sigma.has_gradient()) {
    const Mat g0 = d.metric.base(Vec::Zero(d.metric.dim));
    d.metric.christoffel = conformal_flat_christoffel(g0, d.metric.sigma);
  } else {
    d.metric.christoffel = nullptr;
  }
  return SpacetimeModel(std::move(d));
}

// Same model with different numerical tolerances.
inline SpacetimeModel with_tolerances(const SpacetimeModel& model, const Tolerances& tol) {
  ModelData d = model.data();
  d.tol = tol;
  return SpacetimeModel(std::move(d));
}

// --- catalog -----------------------------------------------------------------

inline Mat minkowski_eta(int m) {
  Mat eta = Mat::Identity(m, m);
  eta(0, 0) = -1.0;
  return eta;
}

inline ModelData flat_model_data(int m, double half_width) {
  if (m < 2) throw ModelError("dimension must be at least 2");
  ModelData d;
  d.name = "minkowski" + std::to_string(m);
  d.kind = "minkowski";
  d.metric.dim = m;
  const Mat eta = minkowski_eta(m);
  d.metric.base = [eta](const Vec&) { return eta; };
  d.metric.flat_base = true;
  d.metric.sigma = ScalarField::zero();
  d.metric.christoffel = conformal_flat_christoffel(eta, d.metric.sigma);
  d.domain = Box::cube(m, half_width);
  d.domain_description = "box [-" + std::to_string(half_width) + ", " + std::to_string(half_width) + "]^" +
                         std::to_string(m);
  d.timelike = [m](const Vec&) {
    Vec T = Vec::Zero(m);
    T[0] = 1.0;
    return T;
  };
  return d;
}

inline SpacetimeModel minkowski(int m, double half_width = 5.0) {
  return SpacetimeModel(flat_model_data(m, half_width));
}

inline SpacetimeModel conformal_flat(int m, const Expression& sigma, double half_width = 5.0) {
  if (sigma.max_coordinate() >= m)
    throw ModelError("conformal exponent references a coordinate beyond dimension " +
                     std::to_string(m));
  ModelData d = flat_model_data(m, half_width);
  d.metric.sigma = ScalarField::from_expression(sigma);
  d.metric.christoffel = conformal_flat_christoffel(minkowski_eta(m), d.metric.sigma);
  d.name = "conformal_flat" + std::to_string(m) + "[" + sigma.to_string() + "]";
  d.kind = "conformal_flat";
  return SpacetimeModel(std::move(d));
}

// Two-dimensional Minkowski space with the event (1, 1) removed.
inline SpacetimeModel punctured_minkowski2(double half_width = 5.0) {
  ModelData d = flat_model_data(2, half_width);
  d.name = "punctured_minkowski2";
  d.kind = "punctured_minkowski2";
  d.excluded_points.push_back((Vec(2) << 1.0, 1.0).finished());
  return SpacetimeModel(std::move(d));
}

// Three-dimensional Minkowski space restricted to t^2 + x^2 + y^2 < 1.
inline SpacetimeModel minkowski_ball3() {
  ModelData d = flat_model_data(3, 1.0);
  d.name = "minkowski_ball3";
  d.kind = "minkowski_ball3";
  d.domain_predicate = [](const Vec& x) { return x.squaredNorm() < 1.0; };
  d.domain_description = "open unit ball t^2+x^2+y^2<1";
  return SpacetimeModel(std::move(d));
}

}  // namespace lightrays

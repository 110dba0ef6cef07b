#pragma once

// Reference computations that share no code path with the evaluators they
// check. Used by the check harness and the test suites.

#include <array>
#include <cmath>
#include <vector>

#include "lightrays/contact.hpp"

namespace lightrays::oracle {

// Full tensor R^l_{kij} = d_i G^l_jk - d_j G^l_ik + G^l_ip G^p_jk - G^l_jp G^p_ik
// with coordinate partials of the Christoffel symbols by central differences.
class RiemannTensor {
 public:
  RiemannTensor(const SpacetimeModel& model, const Vec& x, double h = 1e-5) : m_(model.dim()) {
    const auto mm = static_cast<std::size_t>(m_);
    r_.assign(mm * mm * mm * mm, 0.0);
    std::vector<Christoffel> dG;
    for (int i = 0; i < m_; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      Christoffel d = model.christoffel_raw(xp);
      d -= model.christoffel_raw(xm);
      d *= 1.0 / (2.0 * h);
      dG.push_back(d);
    }
    const Christoffel G = model.christoffel_raw(x);
    for (int l = 0; l < m_; ++l)
      for (int k = 0; k < m_; ++k)
        for (int i = 0; i < m_; ++i)
          for (int j = 0; j < m_; ++j) {
            double s = dG[static_cast<std::size_t>(i)](l, j, k) - dG[static_cast<std::size_t>(j)](l, i, k);
            for (int p = 0; p < m_; ++p) s += G(l, i, p) * G(p, j, k) - G(l, j, p) * G(p, i, k);
            at(l, k, i, j) = s;
          }
  }

  double operator()(int l, int k, int i, int j) const { return r_[idx(l, k, i, j)]; }

  // R(X, Y)Z
  Vec apply(const Vec& X, const Vec& Y, const Vec& Z) const {
    Vec out = Vec::Zero(m_);
    for (int l = 0; l < m_; ++l)
      for (int k = 0; k < m_; ++k)
        for (int i = 0; i < m_; ++i)
          for (int j = 0; j < m_; ++j) out[l] += (*this)(l, k, i, j) * Z[k] * X[i] * Y[j];
    return out;
  }

 private:
  std::size_t idx(int l, int k, int i, int j) const {
    const auto m = static_cast<std::size_t>(m_);
    return ((static_cast<std::size_t>(l) * m + static_cast<std::size_t>(k)) * m + static_cast<std::size_t>(i)) * m +
           static_cast<std::size_t>(j);
  }
  double& at(int l, int k, int i, int j) { return r_[idx(l, k, i, j)]; }
  int m_;
  std::vector<double> r_;
};

// Levi-Civita symbols of exp(2 sigma) eta from d(g_ij) = 2 (d sigma) g_ij.
inline Christoffel conformal_christoffel(int m, const Vec& dsigma, double sigma_value) {
  const Mat g = std::exp(2.0 * sigma_value) * minkowski_eta(m);
  const Mat ginv = g.inverse();
  Christoffel G(m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l)
          s += ginv(k, l) * (2.0 * dsigma[i] * g(l, j) + 2.0 * dsigma[j] * g(l, i) - 2.0 * dsigma[l] * g(i, j));
        G(k, i, j) = 0.5 * s;
      }
  return G;
}

// h^{-1}(t) for constant acceleration factor f = c.
inline double h_inverse_constant(double c, double t) { return c == 0.0 ? t : std::expm1(c * t) / c; }

// -d theta_g(xi1, xi2) by circulation of theta_g around the parallelogram
// spanned by eps xi1, eps xi2 and centered at the base (4-point Gauss per edge).
inline double stokes_omega(const SpacetimeModel& model, const TMTangent& xi1, const TMTangent& xi2, double eps = 1e-3) {
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                               0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                 0.3478548451374538};
  auto theta_at = [&](double a, double b, const TMTangent& dir) {
    const Vec x = xi1.x + eps * (a * xi1.dx + b * xi2.dx);
    const Vec v = xi1.v + eps * (a * xi1.dv + b * xi2.dv);
    return inner(model.metric_raw(x), v, dir.dx);
  };
  // Edges of [-1/2, 1/2]^2 counterclockwise; each integral is over a unit
  // parameter interval in the (a, b) square, scaled by eps.
  auto edge = [&](double a0, double b0, double da, double db, const TMTangent& dir, double sign) {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double u = 0.5 * nodes[k];
      s += 0.5 * weights[k] * theta_at(a0 + u * da, b0 + u * db, dir);
    }
    return sign * eps * s;
  };
  const double circulation = edge(0.0, -0.5, 1.0, 0.0, xi1, 1.0) + edge(0.5, 0.0, 0.0, 1.0, xi2, 1.0) +
                             edge(0.0, 0.5, 1.0, 0.0, xi1, -1.0) + edge(-0.5, 0.0, 0.0, 1.0, xi2, -1.0);
  return -circulation / (eps * eps);
}

// theta(g-hat_* xi) = p(d pi g-hat_* xi) with p = lower_index(v).
inline double theta_pullback(const SpacetimeModel& model, const TMTangent& xi) {
  return lower_index(model, xi.x, xi.v).dot(lower_pushforward(model, xi).first);
}

// Closed-form flat Jacobi field J(t) = J0 + t J0dot.
inline Vec flat_jacobi(const JacobiInit& init, double t) { return init.J0 + t * init.J0dot; }

}  // namespace lightrays::oracle

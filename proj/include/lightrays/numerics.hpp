#pragma once

// Small numerical helpers shared by several modules: Hermite interpolation,
// fourth-order cumulative quadrature on irregular grids, and a counter-based
// random stream.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace lightrays {

// Cubic Hermite on [a, b] from values and first derivatives.
template <class T>
T hermite3(double a, double b, const T& ya, const T& dya, const T& yb, const T& dyb, double t) {
  const double h = b - a;
  const double s = (t - a) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * ya + (h10 * h) * dya + h01 * yb + (h11 * h) * dyb;
}

// Quintic Hermite on [a, b] from values, first and second derivatives.
// Returns the value and the first derivative at t.
template <class T>
std::pair<T, T> hermite5(double a, double b, const T& y0, const T& d0, const T& dd0, const T& y1,
                         const T& d1, const T& dd1, double t) {
  const double h = b - a;
  const double s = (t - a) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double G0 = 10 * s3 - 15 * s4 + 6 * s5;
  const double G1 = -4 * s3 + 7 * s4 - 3 * s5;
  const double G2 = 0.5 * s3 - s4 + 0.5 * s5;
  const double dH0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double dH1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double dH2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double dG0 = 30 * s2 - 60 * s3 + 30 * s4;
  const double dG1 = -12 * s2 + 28 * s3 - 15 * s4;
  const double dG2 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  T y = H0 * y0 + (H1 * h) * d0 + (H2 * h * h) * dd0 + G0 * y1 + (G1 * h) * d1 + (G2 * h * h) * dd1;
  T dy = (dH0 / h) * y0 + dH1 * d0 + (dH2 * h) * dd0 + (dG0 / h) * y1 + dG1 * d1 + (dG2 * h) * dd1;
  return {std::move(y), std::move(dy)};
}

// Running integral F_i = int_{t_0}^{t_i} y dt. Each interval integrates the
// cubic through the four nearest samples (two-point Gauss is exact for it),
// which is fourth-order accurate on smooth data with arbitrary spacing.
inline std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n != y.size()) throw std::invalid_argument("cumulative_integral: size mismatch");
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return F;
  }
  const double g = 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t lo = i == 0 ? 0 : i - 1;
    if (lo + 4 > n) lo = n - 4;
    auto lagrange = [&](double x) {
      double s = 0.0;
      for (std::size_t a = lo; a < lo + 4; ++a) {
        double w = 1.0;
        for (std::size_t b = lo; b < lo + 4; ++b)
          if (b != a) w *= (x - t[b]) / (t[a] - t[b]);
        s += w * y[a];
      }
      return s;
    };
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double h = t[i + 1] - t[i];
    F[i + 1] = F[i] + 0.5 * h * (lagrange(mid - g * h) + lagrange(mid + g * h));
  }
  return F;
}

// Derivative of samples on an irregular grid by the three-point formula
// (one-sided at the ends).
template <class T>
std::vector<T> finite_difference_derivative(std::span<const double> t, std::span<const T> y) {
  const std::size_t n = t.size();
  std::vector<T> d(n);
  auto three = [&](std::size_t i0, std::size_t i1, std::size_t i2, double x) {
    const double x0 = t[i0], x1 = t[i1], x2 = t[i2];
    const double w0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double w1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double w2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return T(w0 * y[i0] + w1 * y[i1] + w2 * y[i2]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      d[i] = three(0, 1, 2, t[0]);
    else if (i + 1 == n)
      d[i] = three(n - 3, n - 2, n - 1, t[n - 1]);
    else
      d[i] = three(i - 1, i, i + 1, t[i]);
  }
  return d;
}

// Fornberg weights for the first derivative at z from the given abscissae.
inline std::vector<double> derivative_weights(std::span<const double> x, double z) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

// Five-point (fourth-order) derivative on an arbitrary ascending grid;
// one-sided stencils at the ends. Needs at least 5 samples.
template <class T>
std::vector<T> finite_difference_derivative5(std::span<const double> t, std::span<const T> y) {
  const std::size_t n = t.size();
  std::vector<T> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i < 2 ? 0 : std::min(i - 2, n - 5);
    const auto w = derivative_weights(t.subspan(lo, 5), t[i]);
    T acc = w[0] * y[lo];
    for (std::size_t k = 1; k < 5; ++k) acc = acc + w[k] * y[lo + k];
    d[i] = acc;
  }
  return d;
}

// Counter-based generator: the value at (seed, stream, index) is a pure
// function of its arguments, so work can be split across threads in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream) : key_(mix(seed ^ hash(stream))) {}

  std::uint64_t bits(std::uint64_t index) const { return mix(key_ + 0x9E3779B97F4A7C15ULL * (index + 1)); }

  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }
  double uniform(std::uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index);
  }
  double normal(std::uint64_t index) const {
    double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  class Stream;
  Stream stream() const;


  static std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t key_;
};

// A sequential view for convenience in tests and sweeps.
class CounterRng::Stream {
 public:
  explicit Stream(const CounterRng& rng) : rng_(rng) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return rng_.uniform(next_++, lo, hi); }
  double normal() { return rng_.normal(next_++); }
  Eigen::VectorXd uniform_vec(int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Eigen::VectorXd normal_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};


inline CounterRng::Stream CounterRng::stream() const { return Stream(*this); }

// Observed convergence orders log2(e_k / e_{k+1}) for errors at halved steps.
inline std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) p.push_back(std::log2(errors[i] / errors[i + 1]));
  return p;
}

}  // namespace lightrays

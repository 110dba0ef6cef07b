#pragma once

// Residual records and the invariant matrix. Every module invariant is one
// CheckEntry; extra entries carry closed-form examples, oracle cross-checks
// and mutation controls. Each entry draws from its own counter-based stream,
// so entries can run in any order or in parallel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lightrays/probes.hpp"

namespace lightrays::checks {

struct ResidualRecord {
  std::string check_id;
  std::string inputs_digest;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // residual <relation> tolerance
  bool pass = false;
  std::string note;  // error text when the check threw
};

// FNV-1a, 64 bit, as 16 hex digits.
inline std::string digest(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string describe(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  return os.str();
}

// NaN compares false under every relation.
inline bool holds(double residual, double tolerance, std::string_view relation) {
  if (relation == "<=") return residual <= tolerance;
  if (relation == "<") return residual < tolerance;
  if (relation == ">=") return residual >= tolerance;
  if (relation == ">") return residual > tolerance;
  if (relation == "==") return residual == tolerance;
  return false;
}

inline ResidualRecord record(std::string id, std::string_view inputs, double residual, double tolerance,
                             std::string relation = "<=") {
  ResidualRecord r{std::move(id), digest(inputs), residual, tolerance, std::move(relation), false, {}};
  r.pass = holds(r.residual, r.tolerance, r.relation);
  return r;
}

// Worst case over many evaluations of one quantity: max for upper bounds,
// min for lower bounds, first mismatch for equalities. A NaN sticks.
class Sweep {
 public:
  Sweep(std::string id, double tolerance, std::string relation = "<=")
      : id_(std::move(id)), tol_(tolerance), rel_(std::move(relation)) {
    if (rel_ == "==")
      worst_ = tol_;
    else
      worst_ = upper() ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  }

  void add(double r, std::string_view inputs) {
    inputs_ += inputs;
    inputs_ += ';';
    ++count_;
    if (std::isnan(worst_)) return;
    if (rel_ == "==") {
      if (worst_ == tol_ && r != tol_) worst_ = r;
      return;
    }
    if (std::isnan(r) || (upper() ? r > worst_ : r < worst_)) worst_ = r;
  }

  int count() const { return count_; }

  ResidualRecord result() const {
    return record(id_, inputs_, count_ ? worst_ : std::numeric_limits<double>::quiet_NaN(), tol_, rel_);
  }

 private:
  bool upper() const { return rel_ == "<=" || rel_ == "<"; }
  std::string id_;
  double tol_;
  std::string rel_;
  double worst_;
  int count_ = 0;
  std::string inputs_;
};

struct CheckContext {
  std::uint64_t seed = 1;
};

using Records = std::vector<ResidualRecord>;

struct CheckEntry {
  std::string id;
  std::string module;
  std::string invariant;  // manifest id covered, empty for extra checks
  std::function<Records(const CheckContext&)> run;
};

struct Invariant {
  std::string id;
  std::string statement;
};

// One line per module invariant; check_all asserts each is covered exactly once.
inline const std::vector<Invariant>& invariant_manifest() {
  static const std::vector<Invariant> manifest{
      {"spacetime.metric_sanity", "catalog metrics symmetric, Lorentzian, T timelike future at 100 points"},
      {"spacetime.christoffel_fd_order", "finite-difference Christoffel path converges at order >= 1.9"},
      {"spacetime.riemann_flat", "curvature operator vanishes on flat and constant-factor models"},
      {"spacetime.raise_lower", "raise after lower is the identity"},
      {"geodesics.null_drift", "null drift <= 1e-8 |v0|^2 on integrated rays"},
      {"geodesics.affine_rescale", "integrate(p, lambda v)(t) = integrate(p, v)(lambda t)"},
      {"geodesics.rk_order", "RK self-convergence order >= 3.9 on curved models"},
      {"geodesics.reparametrize_residual", "reparametrized pregeodesics are geodesics to 1e-6"},
      {"jacobi.uniqueness_linearity", "init -> field is linear with trivial kernel"},
      {"jacobi.pairing_linearity", "g(J, gamma') is affine in t on 100 random triples"},
      {"jacobi.dimension", "solution space rank 2m, light-ray constraint rank 2m-1, (a+bt)gamma' reduce to 0"},
      {"jacobi.conformal_invariance", "classes agree between g and exp(2 sigma) g"},
      {"jacobi.reparametrization_invariance", "variations realizing the same curve of rays give equal classes"},
      {"jacobi.variation_oracle", "initial values recovered from the finite-difference variation at O(ds^2)"},
      {"lightrays.chart_dimension", "ray coordinates have length 2m-3"},
      {"lightrays.chart_invariance", "ray_to_chart is invariant under shifts and rescalings"},
      {"lightrays.tangent_linearity", "tangent_from_ray_curve is linear in the curve"},
      {"lightrays.variation_independence", "variations through different slices give equal classes"},
      {"contact.gauge_independence", "theta_0 and omega_0 independent of the representative"},
      {"contact.nondegeneracy", "omega_0 nondegenerate on the contact frame"},
      {"contact.kernel_transverse", "kernel of omega_0 meets the hyperplane trivially"},
      {"contact.hyperplane_invariance", "hyperplane invariant under rescaling and conformal change"},
      {"contact.spray_kernel", "omega_g(X_g, .) vanishes on tangents to the null cone bundle"},
      {"contact.two_path_theta", "theta_0 from theta_g on chart tangents equals the Jacobi formula"},
      {"cli.determinism", "identical scenario and seed give byte-identical reports"},
      {"cli.coverage", "every module invariant appears exactly once in the matrix"},
  };
  return manifest;
}

// Throws CoverageError unless each manifest id is claimed by exactly one
// entry and every claimed id is in the manifest.
inline void assert_coverage(const std::vector<CheckEntry>& entries) {
  std::map<std::string, int> claimed;
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.id).second) throw CoverageError("duplicate check id " + e.id);
    if (!e.invariant.empty()) ++claimed[e.invariant];
  }
  std::set<std::string> known;
  for (const auto& inv : invariant_manifest()) {
    known.insert(inv.id);
    const int n = claimed.count(inv.id) ? claimed.at(inv.id) : 0;
    if (n != 1) throw CoverageError(inv.id + " is covered " + std::to_string(n) + " times");
  }
  for (const auto& [id, n] : claimed)
    if (!known.count(id)) throw CoverageError(id + " is not in the invariant manifest");
}

// Runs one entry; a throwing check becomes a failing record carrying the error.
inline Records run_entry(const CheckEntry& e, const CheckContext& ctx) {
  try {
    Records r = e.run(ctx);
    if (r.empty()) r.push_back(record(e.id + "/empty", e.id, std::numeric_limits<double>::quiet_NaN(), 0.0));
    return r;
  } catch (const std::exception& ex) {
    ResidualRecord r = record(e.id + "/error", e.id, std::numeric_limits<double>::quiet_NaN(), 0.0);
    r.note = ex.what();
    return {r};
  }
}

namespace detail {

inline CounterRng::Stream stream(const CheckContext& ctx, const std::string& label) {
  return CounterRng(ctx.seed, label).stream();
}

struct NamedModel {
  std::string label;
  SpacetimeModel model;
};

inline std::vector<NamedModel> catalog_models() {
  return {{"mink2", minkowski(2)},
          {"mink3", minkowski(3)},
          {"mink4", minkowski(4)},
          {"conf3", fixtures::conf(3).model},
          {"conf4", fixtures::conf(4).model},
          {"punctured2", punctured_minkowski2()},
          {"ball3", minkowski_ball3()}};
}

// Uniform domain point, rejecting points outside the predicate or near punctures.
inline Vec domain_point(const SpacetimeModel& model, CounterRng::Stream& st) {
  const Box& b = model.domain();
  for (;;) {
    Vec x(model.dim());
    for (int i = 0; i < model.dim(); ++i) x[i] = st.uniform(b.lo[i], b.hi[i]);
    if (model.in_domain(x)) return x;
  }
}

inline GeodesicState random_null_state(const SpacetimeModel& model, CounterRng::Stream& st) {
  const int m = model.dim();
  const Vec x = st.uniform_vec(m, -1, 1);
  return {x, make_null(model, x, st.normal_vec(m - 1))};
}

inline std::string ray_inputs(const std::string& fixture, const LightRay& r) {
  return fixture + ":" + describe(r.q) + "|" + describe(r.v);
}

inline Vec unit_dir(CounterRng::Stream& st, int m) { return fixtures::random_unit(st, ray_coords_size(m)); }

inline double order_min(const std::vector<double>& e) {
  double q = std::numeric_limits<double>::infinity();
  for (double o : observed_orders(e)) q = std::min(q, o);
  return q;
}

// Matrix rank by full-pivot LU with an absolute threshold relative to the largest pivot.
inline int rank_of(const Mat& M, double threshold = 1e-9) {
  return static_cast<int>(Eigen::FullPivLU<Mat>(M).setThreshold(threshold).rank());
}

}  // namespace detail

// --- non-Hausdorff example -----------------------------------------------------------

struct Segment {
  double s_begin = 0.0;
  double s_end = 0.0;
  std::string end_reason;
  NullGeodesic geodesic;
};

struct Approximant {
  int n = 0;
  double tau = 0.0;
  int segment_count = 0;
  double q_slice0 = 0.0;  // chart coordinate on x0 = 0
  double q_slice2 = 0.0;  // chart coordinate on x0 = 2
};

struct NonHausdorffSection {
  std::vector<Approximant> approximants;
  std::vector<Segment> limit_segments;
  std::vector<double> limit_q;  // chart coordinate of each limit segment on the slice it crosses
  std::vector<int> limit_crossings;  // number of the two slices each limit segment crosses
  Records records;
};

// Maximal segments of the null line through p with velocity v over the
// window [s0, s1]: an exclusion hit ends a segment and a new one starts
// 1e-6 past the puncture.
inline std::vector<Segment> maximal_segments(const SpacetimeModel& model, const Vec& p, const Vec& v, double s0,
                                             double s1, int steps_per_unit = kDefaultStepsPerUnit) {
  std::vector<Segment> out;
  NullGeodesic cur = integrate_ray(model, p, v, s0, s1, steps_per_unit);
  if (cur.backward.reason != Termination::IntervalEnd)
    throw OutOfDomain("start of the window is not reachable from " + format_point(p));
  double origin = 0.0;  // window parameter of the current segment's t = 0
  for (;;) {
    const double begin = origin + cur.t_min();
    if (cur.forward.reason == Termination::IntervalEnd) {
      out.push_back({begin, origin + cur.t_max(), to_string(cur.forward.reason), cur});
      return out;
    }
    const double hit = origin + cur.forward.parameter;
    out.push_back({begin, hit, to_string(cur.forward.reason), cur});
    if (cur.forward.reason != Termination::ExclusionHit || hit + 1e-6 >= s1) return out;
    // Restart 1e-6 past the puncture: one RK4 step from the last stored node.
    const GeodesicNode& last = cur.nodes.back();
    const GeodesicState past = rk4_step(model, {last.x, last.v}, hit + 1e-6 - (origin + last.t));
    origin = hit + 1e-6;
    cur = integrate_ray(model, past.x, past.v, 0.0, s1 - origin, steps_per_unit);
  }
}

inline NonHausdorffSection nonhausdorff_demo(const SpacetimeModel& model, int n_max = 12,
                                             std::pair<double, double> window = {-0.5, 3.0}) {
  if (model.kind() != "punctured_minkowski2")
    throw WrongMetric("the non-Hausdorff example needs punctured_minkowski2, got " + model.kind());
  const auto chart0 = std::make_shared<const CauchyChart>(
      build_chart(model, Box{(Vec(2) << -1.0, -3.0).finished(), (Vec(2) << 0.9, 3.0).finished()}, 0.0));
  const auto chart2 = std::make_shared<const CauchyChart>(
      build_chart(model, Box{(Vec(2) << 1.1, -3.0).finished(), (Vec(2) << 3.0, 3.0).finished()}, 2.0));
  const Vec v = (Vec(2) << 1.0, 1.0).finished();
  NonHausdorffSection sec;

  Sweep single("nonhausdorff.approximants_single_segment", 0.0, "==");
  Records gaps;
  for (int n = 1; n <= n_max; ++n) {
    const double tau = std::ldexp(1.0, -n);
    const Vec p = (Vec(2) << 0.0, tau).finished();
    const auto segs = maximal_segments(model, p, v, window.first, window.second);
    Approximant a{n, tau, static_cast<int>(segs.size()), 0.0, 0.0};
    const bool whole = segs.size() == 1 && segs[0].end_reason == to_string(Termination::IntervalEnd) &&
                       std::abs(segs[0].s_begin - window.first) <= 1e-12 &&
                       std::abs(segs[0].s_end - window.second) <= 1e-12;
    single.add(whole ? 0.0 : 1.0, std::to_string(n));
    a.q_slice0 = ray_to_chart(chart0, segs[0].geodesic).q[0];
    a.q_slice2 = ray_to_chart(chart2, segs[0].geodesic).q[0];
    sec.approximants.push_back(a);
  }

  sec.limit_segments = maximal_segments(model, Vec::Zero(2), v, window.first, window.second);
  const auto& L = sec.limit_segments;
  sec.records.push_back(single.result());
  sec.records.push_back(record("nonhausdorff.limit_segment_count", "limit", static_cast<double>(L.size()), 2.0, "=="));
  if (L.size() == 2) {
    sec.records.push_back(record("nonhausdorff.limit_first_end", "limit", std::abs(L[0].s_end - 1.0), 1e-3));
    sec.records.push_back(record("nonhausdorff.limit_second_begin", "limit", std::abs(L[1].s_begin - 1.0), 1e-3));
    sec.records.push_back(record("nonhausdorff.limit_ranges_disjoint", "limit", L[1].s_begin - L[0].s_end, 0.0, ">"));
  }
  // Each limit segment crosses exactly one of the two slices.
  const std::vector<std::shared_ptr<const CauchyChart>> charts{chart0, chart2};
  double both = 0.0;
  for (const auto& seg : L) {
    int crossings = 0;
    double q = std::numeric_limits<double>::quiet_NaN();
    for (const auto& c : charts) {
      try {
        q = ray_to_chart(c, seg.geodesic).q[0];
        ++crossings;
      } catch (const NoCrossing&) {
      }
    }
    sec.limit_q.push_back(q);
    sec.limit_crossings.push_back(crossings);
    if (crossings != 1) both += 1.0;
  }
  sec.records.push_back(record("nonhausdorff.no_joint_limit", "limit", both, 0.0, "=="));
  if (L.size() == 2) {
    // Gap to the limit is tau_n up to root-finding precision.
    Sweep g0("nonhausdorff.gap_slice0", 1e-12), g2("nonhausdorff.gap_slice2", 1e-12);
    for (const auto& a : sec.approximants) {
      g0.add(std::abs(a.q_slice0 - sec.limit_q[0]) - a.tau, std::to_string(a.n));
      g2.add(std::abs(a.q_slice2 - sec.limit_q[1]) - a.tau, std::to_string(a.n));
    }
    sec.records.push_back(g0.result());
    sec.records.push_back(g2.result());
  }
  return sec;
}

// --- matrix entries ------------------------------------------------------------------

namespace entries {

using detail::ray_inputs;
using detail::stream;

inline Records spacetime_metric_sanity(const CheckContext& ctx) {
  Records out;
  for (const auto& [label, model] : detail::catalog_models()) {
    auto st = stream(ctx, "metric_sanity/" + label);
    Sweep sym("spacetime.metric_sanity/" + label + "/symmetry", 1e-12);
    Sweep neg("spacetime.metric_sanity/" + label + "/negative_eigenvalues", 1.0, "==");
    Sweep tt("spacetime.metric_sanity/" + label + "/g_TT", 0.0, "<");
    Sweep fut("spacetime.metric_sanity/" + label + "/T0", 0.0, ">");
    for (int k = 0; k < 100; ++k) {
      const Vec x = detail::domain_point(model, st);
      const Mat g = model.metric_raw(x);
      const Vec T = model.timelike_raw(x);
      Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
      const std::string in = describe(x);
      sym.add((g - g.transpose()).cwiseAbs().maxCoeff(), in);
      neg.add(static_cast<double>((es.eigenvalues().array() < 0.0).count()), in);
      tt.add(inner(g, T, T), in);
      fut.add(T[0], in);
    }
    for (const auto* s : {&sym, &neg, &tt, &fut}) out.push_back(s->result());
  }
  return out;
}

inline Records spacetime_christoffel_fd_order(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "christoffel_order/" + fx.name);
    Sweep ord("spacetime.christoffel_fd_order/" + fx.name, 1.9, ">=");
    for (int k = 0; k < 10; ++k) {
      const Vec x = st.uniform_vec(fx.model.dim(), -1, 1);
      const Christoffel exact = fx.model.christoffel_raw(x);
      std::vector<double> e;
      for (double h : {4e-3, 2e-3, 1e-3}) e.push_back((fx.model.christoffel_fd(x, h) - exact).max_abs());
      ord.add(detail::order_min(e), describe(x));
    }
    out.push_back(ord.result());
  }
  return out;
}

inline Records spacetime_riemann_flat(const CheckContext& ctx) {
  Records out;
  const std::vector<detail::NamedModel> models{{"mink3", minkowski(3)},
                                              {"mink4", minkowski(4)},
                                              {"const3", conformal_flat(3, Expression::parse("0.4"))},
                                              {"const4", conformal_flat(4, Expression::parse("-0.3"))}};
  for (const auto& [label, model] : models) {
    auto st = stream(ctx, "riemann_flat/" + label);
    Sweep s("spacetime.riemann_flat/" + label, 1e-9);
    for (int k = 0; k < 20; ++k) {
      const Vec x = st.uniform_vec(model.dim(), -1, 1), J = st.normal_vec(model.dim()),
                v = st.normal_vec(model.dim());
      s.add(riemann_op(model, x, J, v).norm(), describe(x));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records spacetime_raise_lower(const CheckContext& ctx) {
  Records out;
  for (const auto& [label, model] : detail::catalog_models()) {
    auto st = stream(ctx, "raise_lower/" + label);
    Sweep s("spacetime.raise_lower/" + label, 1e-12);
    for (int k = 0; k < 100; ++k) {
      const Vec x = detail::domain_point(model, st), v = st.normal_vec(model.dim());
      s.add((raise_index(model, x, lower_index(model, x, v)) - v).norm(), describe(x) + "|" + describe(v));
    }
    out.push_back(s.result());
  }
  return out;
}

// Analytic conformal symbols vs an independent formula and the FD path;
// the curvature operator vs the full tensor oracle.
inline Records spacetime_oracles(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::curved()) {
    const int m = fx.model.dim();
    const ScalarField sigma = ScalarField::from_expression(Expression::parse(m == 3 ? fixtures::kSigma3 : fixtures::kSigma4));
    auto st = stream(ctx, "oracles/" + fx.name);
    Sweep sym("spacetime.christoffel_paths/" + fx.name + "/oracle", 1e-12);
    Sweep fd("spacetime.christoffel_paths/" + fx.name + "/fd", 1e-6);
    Sweep rie("spacetime.riemann_tensor/" + fx.name, 1e-6);
    for (int k = 0; k < 10; ++k) {
      const Vec x = st.uniform_vec(m, -1, 1), J = st.normal_vec(m), v = st.normal_vec(m);
      const Christoffel G = fx.model.christoffel_raw(x);
      const std::string in = describe(x);
      sym.add((G - oracle::conformal_christoffel(m, sigma.gradient(x), sigma.value(x))).max_abs(), in);
      fd.add((G - fx.model.christoffel_fd(x, fx.model.tol().h_fd)).max_abs(), in);
      rie.add((riemann_op(fx.model, x, J, v) - oracle::RiemannTensor(fx.model, x).apply(J, v, v)).norm(), in);
    }
    for (const auto* s : {&sym, &fd, &rie}) out.push_back(s->result());
  }
  return out;
}

inline Records geodesics_null_drift(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "null_drift/" + fx.name);
    Sweep s("geodesics.null_drift/" + fx.name, 1e-8);
    for (int k = 0; k < 10; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(null_drift(chart_to_ray(r, {-1.0, 1.0})), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records geodesics_affine_rescale(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "affine_rescale/" + fx.name);
    Sweep s("geodesics.affine_rescale/" + fx.name, 1e-9);
    for (int k = 0; k < 4; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto a = integrate_geodesic(fx.model, r.event(), r.v, {0.0, 1.0}, 400);
      for (double lambda : {0.5, 2.0}) {
        const auto b = integrate_geodesic(fx.model, r.event(), lambda * r.v, {0.0, 1.0 / lambda}, 400);
        double e = 0.0;
        for (std::size_t i = 0; i < a.nodes.size(); ++i)
          e = std::max({e, (a.nodes[i].x - b.nodes[i].x).norm(), (lambda * a.nodes[i].v - b.nodes[i].v).norm()});
        s.add(e, ray_inputs(fx.name, r) + "|" + std::to_string(lambda));
      }
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records geodesics_rk_order(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "rk_order/" + fx.name);
    Sweep s("geodesics.rk_order/" + fx.name, 3.9, ">=");
    // Nearly straight rays have truncation error at rounding level, where a
    // ratio says nothing; they are skipped and more rays drawn.
    for (int k = 0; k < 16 && s.count() < 4; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      auto at = [&](int n) { return integrate_geodesic(fx.model, r.event(), r.v, {0.0, 1.5}, n).nodes.back().x; };
      const Vec x1 = at(50), x2 = at(100), x3 = at(200);
      if ((x2 - x3).norm() < 1e-12) continue;
      s.add(std::log2((x1 - x2).norm() / (x2 - x3).norm()), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
    out.push_back(record("geodesics.rk_order/" + fx.name + "/measured_rays", fx.name, s.count(), 4.0, ">="));
  }
  return out;
}

// Straight line p + h(t) v traversed with x' = e^{ct} v, so D x'/dt = c x'.
inline Pregeodesic exponential_pregeodesic(const Vec& p, const Vec& v, double c, double length = 1.2, int n = 801) {
  Pregeodesic pre;
  for (int i = 0; i < n; ++i) {
    const double u = length * i / (n - 1);
    pre.t.push_back(u);
    pre.x.push_back(p + oracle::h_inverse_constant(c, u) * v);
    pre.xdot.push_back(std::exp(c * u) * v);
    pre.f.push_back(c);
  }
  return pre;
}

inline Records geodesics_reparametrize_residual(const CheckContext& ctx) {
  Records out;
  const auto flat = minkowski(3);
  const Vec p = (Vec(3) << 0.0, 0.2, -0.1).finished(), v = (Vec(3) << 1.0, 0.6, 0.8).finished();
  Sweep closed("geodesics.reparametrize_residual/exponential", 1e-6);
  for (double c : {0.0, 0.5, 1.0})
    closed.add(geodesic_residual(flat, reparametrize_to_geodesic(flat, exponential_pregeodesic(p, v, c)).geodesic.nodes),
               std::to_string(c));
  out.push_back(closed.result());
  for (const auto& fx : fixtures::standard()) {
    const ScalarField sb = ScalarField::from_expression(fixtures::sigma_bar(fx.model.dim()));
    const SpacetimeModel bar = conformal_rescale(fx.model, sb);
    auto st = stream(ctx, "reparametrize/" + fx.name);
    Sweep s("geodesics.reparametrize_residual/" + fx.name, 1e-6);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const NullGeodesic g = integrate_geodesic(fx.model, r.event(), r.v, {0.0, 1.0}, 800);
      Pregeodesic pre;
      for (const auto& node : g.nodes) {
        pre.t.push_back(node.t);
        pre.x.push_back(node.x);
        pre.xdot.push_back(node.v);
        pre.f.push_back(2.0 * sb.gradient(node.x).dot(node.v));
      }
      s.add(geodesic_residual(bar, reparametrize_to_geodesic(bar, pre).geodesic.nodes), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

// h^{-1} closed forms for f = 0 and f = c.
inline Records geodesics_reparametrize_closed_form(const CheckContext&) {
  const auto flat = minkowski(3);
  const Vec p = (Vec(3) << 0.0, 0.2, -0.1).finished(), v = (Vec(3) << 1.0, 0.6, 0.8).finished();
  Sweep s("geodesics.reparametrize_closed_form", 1e-8);
  for (double c : {0.0, 0.5, 1.0}) {
    const Pregeodesic pre = exponential_pregeodesic(p, v, c);
    const Reparametrization r = reparametrize_to_geodesic(flat, pre);
    double e = 0.0;
    for (std::size_t i = 0; i < pre.t.size(); ++i)
      e = std::max(e, std::abs(r.h_inverse[i] - oracle::h_inverse_constant(c, pre.t[i])));
    s.add(e, std::to_string(c));
  }
  return {s.result()};
}

inline Records geodesics_flat_exact(const CheckContext& ctx) {
  Records out;
  for (int m : {3, 4}) {
    const auto fx = fixtures::mink(m);
    auto st = stream(ctx, "flat_exact/" + fx.name);
    Sweep s("geodesics.flat_exact/" + fx.name, 1e-12);
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const NullGeodesic g = chart_to_ray(r, {-1.0, 1.0});
      double e = 0.0;
      for (const auto& n : g.nodes) e = std::max({e, (n.x - (r.event() + n.t * r.v)).norm(), (n.v - r.v).norm()});
      s.add(e, ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records jacobi_uniqueness_linearity(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    const int m = fx.model.dim();
    auto st = stream(ctx, "linearity/" + fx.name);
    Sweep lin("jacobi.uniqueness_linearity/" + fx.name + "/superposition", 1e-9);
    Sweep zero("jacobi.uniqueness_linearity/" + fx.name + "/zero_init", 0.0);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r, {-0.5, 1.0}));
      const JacobiInit u = fixtures::random_init(st, m), w = fixtures::random_init(st, m);
      const double a = st.normal(), b = st.normal();
      const JacobiField Ju = integrate_jacobi(geo, u), Jw = integrate_jacobi(geo, w);
      const JacobiField Jc = integrate_jacobi(geo, {a * u.J0 + b * w.J0, a * u.J0dot + b * w.J0dot});
      const JacobiField Z = integrate_jacobi(geo, {Vec::Zero(m), Vec::Zero(m)});
      double e = 0.0, z = 0.0;
      for (std::size_t i = 0; i < Jc.samples.size(); ++i) {
        e = std::max({e, (Jc.samples[i].J - a * Ju.samples[i].J - b * Jw.samples[i].J).norm(),
                      (Jc.samples[i].Jdot - a * Ju.samples[i].Jdot - b * Jw.samples[i].Jdot).norm()});
        z = std::max(z, Z.samples[i].J.norm() + Z.samples[i].Jdot.norm());
      }
      lin.add(e, ray_inputs(fx.name, r));
      zero.add(z, ray_inputs(fx.name, r));
    }
    out.push_back(lin.result());
    out.push_back(zero.result());
  }
  return out;
}

inline Records jacobi_pairing_linearity(const CheckContext& ctx) {
  Records out;
  int triples = 0;
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "pairing/" + fx.name);
    Sweep s("jacobi.pairing_linearity/" + fx.name, 1e-7);
    for (int k = 0; k < 50; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const JacobiInit init = fixtures::random_init(st, fx.model.dim());
      const JacobiField J = integrate_jacobi(chart_to_ray(r, {-0.5, 1.0}), init);
      s.add(affine_pairing_fit(J).residual, ray_inputs(fx.name, r) + "|" + describe(init.J0) + describe(init.J0dot));
    }
    triples += s.count();
    out.push_back(s.result());
  }
  out.push_back(record("jacobi.pairing_linearity/triples", "count", triples, 100.0, ">="));
  return out;
}

inline Records jacobi_dimension(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    const int m = fx.model.dim();
    auto st = stream(ctx, "dimension/" + fx.name);
    const LightRay r = fixtures::random_ray(fx, st);
    const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r, {0.0, 0.5}));
    const Mat g = fx.model.metric_raw(r.event());
    const Vec T = fx.model.timelike_raw(r.event());
    Mat all(2 * m, 2 * m), lightray(2 * m, 2 * m);
    for (int k = 0; k < 2 * m; ++k) {
      JacobiInit init = fixtures::random_init(st, m);
      const auto end = integrate_jacobi(geo, init).samples.back();
      all.col(k) << end.J, end.Jdot;
      init.J0dot -= (inner(g, init.J0dot, r.v) / inner(g, T, r.v)) * T;
      const auto end_l = integrate_jacobi(geo, init).samples.back();
      lightray.col(k) << end_l.J, end_l.Jdot;
    }
    const std::string in = ray_inputs(fx.name, r);
    out.push_back(record("jacobi.dimension/" + fx.name + "/solutions", in, detail::rank_of(all), 2.0 * m, "=="));
    out.push_back(record("jacobi.dimension/" + fx.name + "/lightray", in, detail::rank_of(lightray), 2.0 * m - 1, "=="));
    Sweep zero("jacobi.dimension/" + fx.name + "/reparametrization_zero", 1e-12);
    for (int k = 0; k < 4; ++k) {
      const double a = st.normal(), b = st.normal();
      const JacobiClass c = mod_gamma_reduce(*geo, {a * r.v, b * r.v});
      zero.add(std::max(c.w.norm(), c.wdot.norm()), std::to_string(a) + "," + std::to_string(b));
    }
    out.push_back(zero.result());
  }
  return out;
}

inline Records jacobi_conformal_invariance(const CheckContext& ctx) {
  Records out;
  int n = 0;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "conformal/" + fx.name);
    Sweep s("jacobi.conformal_invariance/" + fx.name, 1e-6);
    for (int k = 0; k < 6; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto var = probes::random_variation(r, st);
      s.add(probes::conformal_class_defect(var, fixtures::sigma_bar(fx.model.dim()), {0.0, 0.5, 1.0}),
            ray_inputs(fx.name, r) + "|" + describe(var.a) + describe(var.d));
      ++n;
    }
    out.push_back(s.result());
  }
  out.push_back(record("jacobi.conformal_invariance/fixtures", "count", n, 20.0, ">="));
  return out;
}

inline Records jacobi_reparametrization_invariance(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "reparametrization/" + fx.name);
    Sweep s("jacobi.reparametrization_invariance/" + fx.name, 1e-6);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto var = probes::random_variation(r, st);
      s.add(probes::reparametrization_defect(var), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records jacobi_variation_oracle(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "variation_oracle/" + fx.name);
    Sweep order("jacobi.variation_oracle/" + fx.name + "/order", 1.9, ">=");
    Sweep init("jacobi.variation_oracle/" + fx.name + "/initial_values_order", 1.9, ">=");
    Sweep abs("jacobi.variation_oracle/" + fx.name + "/abs_error", 1e-5);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto e = probes::variation_oracle_errors(probes::random_variation(r, st));
      const std::string in = ray_inputs(fx.name, r);
      order.add(detail::order_min(e.errors), in);
      init.add(detail::order_min(e.init_defects), in);
      abs.add(e.errors.back(), in);
    }
    for (const auto* s : {&order, &init, &abs}) out.push_back(s->result());
  }
  return out;
}

inline Records jacobi_flat_exact(const CheckContext& ctx) {
  Records out;
  for (int m : {3, 4}) {
    const auto fx = fixtures::mink(m);
    auto st = stream(ctx, "jacobi_flat/" + fx.name);
    Sweep s("jacobi.flat_exact/" + fx.name, 1e-12);
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const JacobiInit init = fixtures::random_init(st, m);
      const JacobiField J = integrate_jacobi(chart_to_ray(r, {-1.0, 1.0}), init);
      double e = 0.0;
      for (const auto& smp : J.samples)
        e = std::max({e, (smp.J - oracle::flat_jacobi(init, smp.t)).norm(), (smp.Jdot - init.J0dot).norm()});
      s.add(e, ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records mutation_gamma_sign(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "mutation_gamma/" + fx.name);
    Sweep s("mutation.gamma_sign/" + fx.name, 1e-3, ">=");
    for (int k = 0; k < 2; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(probes::variation_oracle_errors(probes::random_variation(r, st), probes::gamma_sign_mutant).errors.back(),
            ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records lightrays_chart_dimension(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    const int m = fx.model.dim();
    auto st = stream(ctx, "chart_dimension/" + fx.name);
    const LightRay r = fixtures::random_ray(fx, st);
    const std::string in = ray_inputs(fx.name, r);
    out.push_back(record("lightrays.chart_dimension/" + fx.name + "/coords", in,
                         static_cast<double>(ray_coords(r).values.size()), 2.0 * m - 3, "=="));
    out.push_back(record("lightrays.chart_dimension/" + fx.name + "/contact_frame", in,
                         static_cast<double>(contact_frame(r).basis.size()), 2.0 * m - 4, "=="));
  }
  return out;
}

inline Records lightrays_chart_invariance(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "chart_invariance/" + fx.name);
    Sweep s("lightrays.chart_invariance/" + fx.name, 1e-9);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      for (double shift : {-0.3, 0.4})
        for (double lambda : {0.5, 3.0})
          s.add(probes::chart_invariance_defect(r, shift, lambda),
                ray_inputs(fx.name, r) + "|" + std::to_string(shift) + "," + std::to_string(lambda));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records lightrays_tangent_linearity(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "tangent_linearity/" + fx.name);
    Sweep s("lightrays.tangent_linearity/" + fx.name, 1e-8);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const Vec dir = detail::unit_dir(st, fx.model.dim());
      for (double a : {2.0, -1.0})
        s.add(probes::tangent_linearity_defect(r, dir, a), ray_inputs(fx.name, r) + "|" + std::to_string(a));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records lightrays_variation_independence(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "variation_independence/" + fx.name);
    Sweep s("lightrays.variation_independence/" + fx.name, 1e-6);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const Vec dir = detail::unit_dir(st, fx.model.dim());
      s.add(probes::variation_independence_defect(r, dir), ray_inputs(fx.name, r) + "|" + describe(dir));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records lightrays_round_trip(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "round_trip/" + fx.name);
    Sweep s("lightrays.round_trip/" + fx.name, 1e-10);
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(probes::round_trip_defect(r), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records contact_gauge_independence(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "gauge/" + fx.name);
    Sweep s("contact.gauge_independence/" + fx.name, 1e-10);
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(probes::gauge_defect(r, st), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records contact_nondegeneracy(const CheckContext& ctx) {
  Records out;
  const auto flat = fixtures::make_fixture("mink3", minkowski(3), true, 2.0);
  const LightRay r0 = make_light_ray(flat.chart, Vec::Zero(2), (Vec(3) << 1.0, 1.0, 0.0).finished());
  const Mat J = (Mat(2, 2) << 0.0, 1.0, -1.0, 0.0).finished();
  out.push_back(record("contact.nondegeneracy/flat3_gram", ray_inputs("mink3", r0), (contact_frame(r0).gram - J).norm(), 1e-10));
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "nondegeneracy/" + fx.name);
    Sweep sv("contact.nondegeneracy/" + fx.name + "/min_singular_value", kDefaultTolerances.tol_contact, ">");
    Sweep chart_sv("contact.nondegeneracy/" + fx.name + "/chart_frame_min_singular_value", kDefaultTolerances.tol_contact, ">");
    Sweep th("contact.nondegeneracy/" + fx.name + "/frame_theta0", 1e-10);
    Sweep rays("contact.nondegeneracy/" + fx.name + "/rays", 20.0, ">=");
    for (int k = 0; k < 20; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const std::string in = ray_inputs(fx.name, r);
      const ContactFrame f = contact_frame(r);
      const ContactFrame cf = chart_contact_frame(fx.chart, r);
      sv.add(nondegeneracy_report(f).min_singular_value, in);
      chart_sv.add(nondegeneracy_report(cf).min_singular_value, in);
      double t = 0.0;
      for (const auto* fr : {&f, &cf})
        for (const auto& b : fr->basis) t = std::max(t, std::abs(theta0(r, b)));
      th.add(t, in);
    }
    rays.add(sv.count(), fx.name);
    for (const auto* s : {&sv, &chart_sv, &th, &rays}) out.push_back(s->result());
  }
  return out;
}

inline Records contact_kernel_transverse(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    const int m = fx.model.dim();
    auto st = stream(ctx, "kernel/" + fx.name);
    Sweep raise("contact.kernel_transverse/" + fx.name + "/rank_increase", 1.0, "==");
    Sweep gram("contact.kernel_transverse/" + fx.name + "/gram_rank", 2.0 * m - 4, "==");
    Sweep theta("contact.kernel_transverse/" + fx.name + "/kernel_theta0", 1e-3, ">=");
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const auto rep = probes::kernel_transverse(r);
      const std::string in = ray_inputs(fx.name, r);
      raise.add(rep.extended_span_rank - rep.frame_span_rank, in);
      gram.add(rep.gram_rank, in);
      theta.add(rep.kernel_theta, in);
    }
    for (const auto* s : {&raise, &gram, &theta}) out.push_back(s->result());
  }
  return out;
}

inline Records contact_hyperplane_invariance(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "hyperplane/" + fx.name);
    Sweep scale("contact.hyperplane_invariance/" + fx.name + "/rescaling", 1e-10);
    Sweep conf("contact.hyperplane_invariance/" + fx.name + "/conformal", 1e-10);
    for (int k = 0; k < 5; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const std::string in = ray_inputs(fx.name, r);
      for (double lambda : {0.5, 3.0}) scale.add(scale_invariance_check(r, lambda, ctx.seed), in + std::to_string(lambda));
      conf.add(probes::conformal_hyperplane_defect(r, fixtures::sigma_bar(fx.model.dim())), in);
    }
    out.push_back(scale.result());
    out.push_back(conf.result());
  }
  return out;
}

inline Records contact_spray_kernel(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "spray_kernel/" + fx.name);
    Sweep s("contact.spray_kernel/" + fx.name, 1e-8);
    Sweep c("contact.spray_kernel/" + fx.name + "/planted_violation", 1e-3, ">=");
    for (int k = 0; k < 5; ++k) {
      const GeodesicState ns = detail::random_null_state(fx.model, st);
      const std::string in = fx.name + ":" + describe(ns.x) + "|" + describe(ns.v);
      s.add(spray_kernel_check(fx.model, ns, 50, ctx.seed + static_cast<std::uint64_t>(k)), in);
      c.add(spray_kernel_control(fx.model, ns, 50, ctx.seed + static_cast<std::uint64_t>(k)), in);
    }
    out.push_back(s.result());
    out.push_back(c.result());
  }
  return out;
}

inline Records contact_two_path_theta(const CheckContext& ctx) {
  Records out;
  int pairs = 0;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "two_path/" + fx.name);
    Sweep s("contact.two_path_theta/" + fx.name, 1e-8);
    for (int k = 0; k < 13; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      const Vec dir = detail::unit_dir(st, fx.model.dim());
      s.add(probes::two_path_theta_defect(r, dir), ray_inputs(fx.name, r) + "|" + describe(dir));
      ++pairs;
    }
    out.push_back(s.result());
  }
  out.push_back(record("contact.two_path_theta/pairs", "count", pairs, 50.0, ">="));
  return out;
}

inline Records contact_hamiltonian(const CheckContext& ctx) {
  Records out;
  for (int m : {3, 4}) {
    const auto fx = fixtures::mink(m);
    auto st = stream(ctx, "hamiltonian/" + fx.name);
    Sweep s("contact.hamiltonian_intertwine/" + fx.name + "/spray", 1e-12);
    for (int k = 0; k < 5; ++k) {
      const GeodesicState ns = detail::random_null_state(fx.model, st);
      s.add(hamiltonian_intertwine_check(fx.model, ns, 1e-3).r_x, describe(ns.x));
    }
    out.push_back(s.result());
  }
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "hamiltonian/" + fx.name);
    Sweep rx("contact.hamiltonian_intertwine/" + fx.name + "/spray", 1e-6);
    Sweep rd("contact.hamiltonian_intertwine/" + fx.name + "/euler", 1e-6);
    Sweep ord("contact.hamiltonian_intertwine/" + fx.name + "/order", 1.9, ">=");
    Sweep lv("contact.liouville/" + fx.name, 1e-8);
    for (int k = 0; k < 20; ++k) {
      const GeodesicState ns = detail::random_null_state(fx.model, st);
      const std::string in = fx.name + ":" + describe(ns.x) + "|" + describe(ns.v);
      std::vector<double> ex, ed;
      for (double d : {4e-3, 2e-3, 1e-3}) {
        const auto r = hamiltonian_intertwine_check(fx.model, ns, d);
        ex.push_back(r.r_x);
        ed.push_back(r.r_delta);
      }
      rx.add(ex.back(), in);
      rd.add(ed.back(), in);
      ord.add(std::min(detail::order_min(ex), detail::order_min(ed)), in);
      for (double sc : {0.1, 0.5}) lv.add(liouville_check(fx.model, ns, sc, 8, ctx.seed), in + std::to_string(sc));
    }
    for (const auto* s : {&rx, &rd, &ord, &lv}) out.push_back(s->result());
  }
  return out;
}

// omega_g against the discrete Stokes oracle; theta_g against the pullback.
inline Records contact_forms_oracles(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::curved()) {
    auto st = stream(ctx, "forms/" + fx.name);
    const int m = fx.model.dim();
    Sweep stokes("contact.omega_stokes/" + fx.name, 1e-5);
    Sweep pull("contact.theta_pullback/" + fx.name, 1e-12);
    Sweep anti("contact.omega_g_antisymmetry/" + fx.name, 1e-14);
    for (int k = 0; k < 10; ++k) {
      const GeodesicState s = detail::random_null_state(fx.model, st);
      const TMTangent a{s.x, s.v, st.normal_vec(m), st.normal_vec(m)};
      const TMTangent b{s.x, s.v, st.normal_vec(m), st.normal_vec(m)};
      const std::string in = describe(s.x);
      stokes.add(std::abs(omega_g(fx.model, a, b) - oracle::stokes_omega(fx.model, a, b)), in);
      pull.add(std::abs(theta_g(fx.model, a) - oracle::theta_pullback(fx.model, a)), in);
      anti.add(std::max(std::abs(omega_g(fx.model, a, a)), std::abs(omega_g(fx.model, a, b) + omega_g(fx.model, b, a))), in);
    }
    for (const auto* s : {&stokes, &pull, &anti}) out.push_back(s->result());
  }
  return out;
}

inline Records contact_omega0_antisymmetry(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "omega0_antisymmetry/" + fx.name);
    Sweep s("contact.omega0_antisymmetry/" + fx.name, 1e-14);
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(probes::antisymmetry_defect(r, st, probes::omega0_reference), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records mutation_omega_symmetrized(const CheckContext& ctx) {
  Records out;
  for (const auto& fx : fixtures::standard()) {
    auto st = stream(ctx, "mutation_omega/" + fx.name);
    Sweep s("mutation.omega_symmetrized/" + fx.name, 1e-3, ">=");
    for (int k = 0; k < 3; ++k) {
      const LightRay r = fixtures::random_ray(fx, st);
      s.add(probes::antisymmetry_defect(r, st, probes::omega0_symmetrized_mutant), ray_inputs(fx.name, r));
    }
    out.push_back(s.result());
  }
  return out;
}

inline Records nonhausdorff_example(const CheckContext&) { return nonhausdorff_demo(punctured_minkowski2()).records; }

}  // namespace entries

// Module entries of the matrix; the cli entries are added by the scenario layer.
inline std::vector<CheckEntry> module_entries() {
  using namespace entries;
  return {
      {"spacetime.metric_sanity", "spacetime", "spacetime.metric_sanity", spacetime_metric_sanity},
      {"spacetime.christoffel_fd_order", "spacetime", "spacetime.christoffel_fd_order", spacetime_christoffel_fd_order},
      {"spacetime.riemann_flat", "spacetime", "spacetime.riemann_flat", spacetime_riemann_flat},
      {"spacetime.raise_lower", "spacetime", "spacetime.raise_lower", spacetime_raise_lower},
      {"spacetime.oracles", "spacetime", "", spacetime_oracles},
      {"geodesics.null_drift", "geodesics", "geodesics.null_drift", geodesics_null_drift},
      {"geodesics.affine_rescale", "geodesics", "geodesics.affine_rescale", geodesics_affine_rescale},
      {"geodesics.rk_order", "geodesics", "geodesics.rk_order", geodesics_rk_order},
      {"geodesics.reparametrize_residual", "geodesics", "geodesics.reparametrize_residual",
       geodesics_reparametrize_residual},
      {"geodesics.reparametrize_closed_form", "geodesics", "", geodesics_reparametrize_closed_form},
      {"geodesics.flat_exact", "geodesics", "", geodesics_flat_exact},
      {"jacobi.uniqueness_linearity", "jacobi", "jacobi.uniqueness_linearity", jacobi_uniqueness_linearity},
      {"jacobi.pairing_linearity", "jacobi", "jacobi.pairing_linearity", jacobi_pairing_linearity},
      {"jacobi.dimension", "jacobi", "jacobi.dimension", jacobi_dimension},
      {"jacobi.conformal_invariance", "jacobi", "jacobi.conformal_invariance", jacobi_conformal_invariance},
      {"jacobi.reparametrization_invariance", "jacobi", "jacobi.reparametrization_invariance",
       jacobi_reparametrization_invariance},
      {"jacobi.variation_oracle", "jacobi", "jacobi.variation_oracle", jacobi_variation_oracle},
      {"jacobi.flat_exact", "jacobi", "", jacobi_flat_exact},
      {"mutation.gamma_sign", "jacobi", "", mutation_gamma_sign},
      {"lightrays.chart_dimension", "lightrays", "lightrays.chart_dimension", lightrays_chart_dimension},
      {"lightrays.chart_invariance", "lightrays", "lightrays.chart_invariance", lightrays_chart_invariance},
      {"lightrays.tangent_linearity", "lightrays", "lightrays.tangent_linearity", lightrays_tangent_linearity},
      {"lightrays.variation_independence", "lightrays", "lightrays.variation_independence",
       lightrays_variation_independence},
      {"lightrays.round_trip", "lightrays", "", lightrays_round_trip},
      {"contact.gauge_independence", "contact", "contact.gauge_independence", contact_gauge_independence},
      {"contact.nondegeneracy", "contact", "contact.nondegeneracy", contact_nondegeneracy},
      {"contact.kernel_transverse", "contact", "contact.kernel_transverse", contact_kernel_transverse},
      {"contact.hyperplane_invariance", "contact", "contact.hyperplane_invariance", contact_hyperplane_invariance},
      {"contact.spray_kernel", "contact", "contact.spray_kernel", contact_spray_kernel},
      {"contact.two_path_theta", "contact", "contact.two_path_theta", contact_two_path_theta},
      {"contact.hamiltonian", "contact", "", contact_hamiltonian},
      {"contact.forms_oracles", "contact", "", contact_forms_oracles},
      {"contact.omega0_antisymmetry", "contact", "", contact_omega0_antisymmetry},
      {"mutation.omega_symmetrized", "contact", "", mutation_omega_symmetrized},
      {"nonhausdorff.example", "cli", "", nonhausdorff_example},
  };
}

}  // namespace lightrays::checks

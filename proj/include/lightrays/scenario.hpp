#pragma once

// Scenario files, the per-kind suites they select, report/CSV output and the
// check_all entry point.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "lightrays/checks.hpp"

namespace lightrays::scenario {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"geodesic_demo",  "jacobi_suite",    "conformal_invariance",
                                              "contact_suite",  "reduction_suite", "nonhausdorff_demo"};
  return kinds;
}

struct MetricInfo {
  std::string kind;
  std::string params;
  std::string description;
};

inline const std::vector<MetricInfo>& metric_catalog() {
  static const std::vector<MetricInfo> catalog{
      {"minkowski", "m (>= 2), half_width (default 5)", "flat metric diag(-1, 1, ..., 1) on the box [-half_width, half_width]^m"},
      {"conformal_flat", "m (>= 2), sigma (expression in x0..x{m-1}), half_width (default 5)",
       "exp(2 sigma) times the flat metric; sigma uses + * - sin and constants"},
      {"punctured_minkowski2", "half_width (default 5)", "two-dimensional flat metric with the event (1, 1) removed"},
      {"minkowski_ball3", "none", "three-dimensional flat metric on the open unit ball"},
  };
  return catalog;
}

struct ChartSpec {
  bool given = false;
  Box V;
  double c0 = 0.0;
};

struct IntegratorSpec {
  int steps_per_unit = kDefaultStepsPerUnit;
  double ds = 1e-3;
  double h_fd = kDefaultTolerances.h_fd;
};

struct ExplicitRay {
  Vec q;
  Vec direction;  // spatial direction in the chart frame, length m - 1
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string kind;
  std::string metric_kind;
  json metric_params = json::object();
  ChartSpec chart;
  IntegratorSpec integrator;
  Tolerances tol;
  std::uint64_t seed = 1;
  int ray_count = 0;
  std::vector<ExplicitRay> explicit_rays;
  json params = json::object();
  json echo;  // parsed document with the effective seed
};

// --- parsing -----------------------------------------------------------------------

namespace detail {

inline int line_at(std::string_view text, std::size_t pos) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(pos, text.size())), '\n'));
}

// Line of the innermost key of a dotted path, located by searching the keys
// in order; 0 when a key does not occur.
inline int line_of(std::string_view text, const std::string& path) {
  std::size_t pos = 0;
  std::stringstream ss(path);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (key.empty() || std::isdigit(static_cast<unsigned char>(key[0]))) continue;
    pos = text.find("\"" + key + "\"", pos);
    if (pos == std::string_view::npos) return 0;
  }
  return line_at(text, pos);
}

class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const int line = line_of(text_, field);
    throw ParseError(source_ + (line ? ":" + std::to_string(line) : std::string()) + ": field '" + field + "': " + msg);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) fail(path, "missing");
    return obj.at(key);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "not finite");
    return d;
  }

  double positive(const json& v, const std::string& path) const {
    const double d = number(v, path);
    if (!(d > 0.0)) fail(path, "must be positive");
    return d;
  }

  std::int64_t integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  Vec vector(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], path);
    return out;
  }

  void only_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) const {
    if (!obj.is_object()) fail(path.empty() ? std::string("<root>") : path, "expected an object");
    for (const auto& [k, _] : obj.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end())
        fail(path.empty() ? k : path + "." + k, "unknown field");
  }

 private:
  std::string_view text_;
  std::string source_;
};

}  // namespace detail

inline Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(detail::line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": syntax error: " + e.what());
  }
  const detail::Reader rd(text, source);
  rd.only_keys(doc,
               {"schema_version", "name", "kind", "metric", "chart", "integrator", "tolerances", "seed", "rays",
                "params"},
               "");
  Scenario s;
  s.schema_version = static_cast<int>(rd.integer(rd.require(doc, "schema_version", "schema_version"), "schema_version"));
  if (s.schema_version != kSchemaVersion)
    rd.fail("schema_version", "unsupported version " + std::to_string(s.schema_version));
  s.name = doc.contains("name") ? rd.string(doc["name"], "name") : source;
  s.kind = rd.string(rd.require(doc, "kind", "kind"), "kind");
  if (std::find(scenario_kinds().begin(), scenario_kinds().end(), s.kind) == scenario_kinds().end())
    rd.fail("kind", "unknown scenario kind '" + s.kind + "'");

  const json& metric = rd.require(doc, "metric", "metric");
  rd.only_keys(metric, {"kind", "params"}, "metric");
  s.metric_kind = rd.string(rd.require(metric, "kind", "metric.kind"), "metric.kind");
  const auto& cat = metric_catalog();
  if (std::none_of(cat.begin(), cat.end(), [&](const MetricInfo& m) { return m.kind == s.metric_kind; }))
    rd.fail("metric.kind", "unknown metric kind '" + s.metric_kind + "'");
  if (metric.contains("params")) {
    if (!metric["params"].is_object()) rd.fail("metric.params", "expected an object");
    s.metric_params = metric["params"];
  }

  if (doc.contains("chart")) {
    const json& c = doc["chart"];
    rd.only_keys(c, {"V", "c0"}, "chart");
    const json& V = rd.require(c, "V", "chart.V");
    rd.only_keys(V, {"lo", "hi"}, "chart.V");
    s.chart.given = true;
    s.chart.V = {rd.vector(rd.require(V, "lo", "chart.V.lo"), "chart.V.lo"),
                 rd.vector(rd.require(V, "hi", "chart.V.hi"), "chart.V.hi")};
    if (s.chart.V.lo.size() != s.chart.V.hi.size()) rd.fail("chart.V.hi", "lo and hi differ in length");
    if ((s.chart.V.hi.array() <= s.chart.V.lo.array()).any()) rd.fail("chart.V.hi", "hi must exceed lo");
    if (c.contains("c0")) s.chart.c0 = rd.number(c["c0"], "chart.c0");
  }

  if (doc.contains("integrator")) {
    const json& in = doc["integrator"];
    rd.only_keys(in, {"steps_per_unit", "ds", "h_fd"}, "integrator");
    if (in.contains("steps_per_unit")) {
      const auto n = rd.integer(in["steps_per_unit"], "integrator.steps_per_unit");
      if (n < kMinSteps) rd.fail("integrator.steps_per_unit", "must be at least " + std::to_string(kMinSteps));
      s.integrator.steps_per_unit = static_cast<int>(n);
    }
    if (in.contains("ds")) s.integrator.ds = rd.positive(in["ds"], "integrator.ds");
    if (in.contains("h_fd")) s.integrator.h_fd = rd.positive(in["h_fd"], "integrator.h_fd");
  }
  s.tol.h_fd = s.integrator.h_fd;

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    rd.only_keys(t, {"tol_null_drift", "tol_geo", "tol_contact"}, "tolerances");
    if (t.contains("tol_null_drift")) s.tol.tol_null_drift = rd.positive(t["tol_null_drift"], "tolerances.tol_null_drift");
    if (t.contains("tol_geo")) s.tol.tol_geo = rd.positive(t["tol_geo"], "tolerances.tol_geo");
    if (t.contains("tol_contact")) s.tol.tol_contact = rd.positive(t["tol_contact"], "tolerances.tol_contact");
  }

  if (doc.contains("seed")) {
    const auto seed = rd.integer(doc["seed"], "seed");
    if (seed < 0) rd.fail("seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.contains("rays")) {
    const json& r = doc["rays"];
    rd.only_keys(r, {"count", "explicit"}, "rays");
    if (r.contains("count")) {
      const auto n = rd.integer(r["count"], "rays.count");
      if (n < 0 || n > 10000) rd.fail("rays.count", "must be in [0, 10000]");
      s.ray_count = static_cast<int>(n);
    }
    if (r.contains("explicit")) {
      if (!r["explicit"].is_array()) rd.fail("rays.explicit", "expected an array");
      for (const auto& e : r["explicit"]) {
        rd.only_keys(e, {"q", "direction"}, "rays.explicit");
        s.explicit_rays.push_back({rd.vector(rd.require(e, "q", "rays.explicit.q"), "rays.explicit.q"),
                                   rd.vector(rd.require(e, "direction", "rays.explicit.direction"),
                                             "rays.explicit.direction")});
      }
    }
  }

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) rd.fail("params", "expected an object");
    s.params = doc["params"];
  }
  s.echo = doc;
  s.echo["seed"] = s.seed;
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

inline void set_seed(Scenario& s, std::uint64_t seed) {
  s.seed = seed;
  s.echo["seed"] = seed;
}

// --- models and rays -----------------------------------------------------------------

namespace detail {

inline double param_or(const json& p, const char* key, double fallback) {
  return p.contains(key) && p[key].is_number() ? p[key].get<double>() : fallback;
}

inline int dim_param(const Scenario& s) {
  if (!s.metric_params.contains("m") || !s.metric_params["m"].is_number_integer())
    throw ParseError(s.name + ": field 'metric.params.m': missing integer dimension");
  const int m = s.metric_params["m"].get<int>();
  if (m < 2 || m > 8) throw ParseError(s.name + ": field 'metric.params.m': must be in [2, 8]");
  return m;
}

}  // namespace detail

inline SpacetimeModel build_metric(const Scenario& s) {
  const json& p = s.metric_params;
  const double half = detail::param_or(p, "half_width", 5.0);
  if (!(half > 0.0)) throw ParseError(s.name + ": field 'metric.params.half_width': must be positive");
  SpacetimeModel model = [&] {
    if (s.metric_kind == "minkowski") return minkowski(detail::dim_param(s), half);
    if (s.metric_kind == "conformal_flat") {
      if (!p.contains("sigma") || !p["sigma"].is_string())
        throw ParseError(s.name + ": field 'metric.params.sigma': missing expression string");
      return conformal_flat(detail::dim_param(s), Expression::parse(p["sigma"].get<std::string>()), half);
    }
    if (s.metric_kind == "punctured_minkowski2") return punctured_minkowski2(half);
    if (s.metric_kind == "minkowski_ball3") return minkowski_ball3();
    throw ParseError(s.name + ": field 'metric.kind': unknown metric kind '" + s.metric_kind + "'");
  }();
  return with_tolerances(model, s.tol);
}

inline std::shared_ptr<const CauchyChart> build_scenario_chart(const Scenario& s, const SpacetimeModel& model) {
  const Box V = s.chart.given ? s.chart.V : Box::cube(model.dim(), 1.0);
  if (V.lo.size() != model.dim()) throw ParseError(s.name + ": field 'chart.V': box dimension differs from the metric");
  return std::make_shared<const CauchyChart>(build_chart(model, V, s.chart.c0));
}

// Explicit rays first, then `count` random rays with q in the middle half of
// the slice box.
inline std::vector<LightRay> scenario_rays(const Scenario& s, const std::shared_ptr<const CauchyChart>& chart) {
  const int m = chart->dim();
  std::vector<LightRay> rays;
  for (const auto& e : s.explicit_rays) {
    if (e.q.size() != m - 1 || e.direction.size() != m - 1)
      throw ParseError(s.name + ": field 'rays.explicit': q and direction need " + std::to_string(m - 1) + " entries");
    const Vec x = chart->event(e.q);
    const Frame f = chart->frame(x);
    Vec dir = Vec::Zero(m);
    for (int i = 0; i < m - 1; ++i) dir += e.direction[i] * f.e[static_cast<std::size_t>(i)];
    rays.push_back(make_light_ray(chart, e.q, make_null_from_vector(chart->model(), x, dir)));
  }
  auto st = CounterRng(s.seed, "scenario_rays").stream();
  const Vec lo = chart->V().lo.tail(m - 1), hi = chart->V().hi.tail(m - 1);
  for (int k = 0; k < s.ray_count; ++k) {
    Vec q(m - 1);
    for (int i = 0; i < m - 1; ++i) q[i] = 0.5 * (lo[i] + hi[i]) + 0.25 * (hi[i] - lo[i]) * st.uniform(-1.0, 1.0);
    const Vec x = chart->event(q);
    const Frame f = chart->frame(x);
    const Vec u = fixtures::random_unit(st, m - 1);
    Vec dir = Vec::Zero(m);
    for (int i = 0; i < m - 1; ++i) dir += u[i] * f.e[static_cast<std::size_t>(i)];
    rays.push_back(make_light_ray(chart, q, make_null_from_vector(chart->model(), x, dir)));
  }
  return rays;
}

// --- worker pool -----------------------------------------------------------------------

// Runs fn(0..n-1) on up to hardware_concurrency threads; results are indexed,
// so the outcome does not depend on scheduling. The first exception by index
// is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// --- reports ---------------------------------------------------------------------------

struct Report {
  json doc;  // report.json content
  checks::Records records;
  bool pass = false;
  std::string rays_csv;
  std::string jacobi_csv;
};

inline json record_json(const checks::ResidualRecord& r) {
  json j{{"check_id", r.check_id}, {"inputs_digest", r.inputs_digest}, {"residual", r.residual},
         {"tolerance", r.tolerance}, {"relation", r.relation},         {"pass", r.pass}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline void sort_records(checks::Records& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.check_id < b.check_id; });
}

inline std::string residuals_csv(const checks::Records& records) {
  std::ostringstream os;
  os.precision(17);
  os << "check_id,inputs_digest,residual,tolerance,relation,pass\n";
  for (const auto& r : records)
    os << r.check_id << "," << r.inputs_digest << "," << r.residual << "," << r.tolerance << "," << r.relation << ","
       << (r.pass ? 1 : 0) << "\n";
  return os.str();
}

// report.json without the wall-time field, for determinism comparisons.
inline std::string canonical_dump(json doc) {
  doc.erase("wall_time_s");
  return doc.dump(2);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

inline void write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", r.doc.dump(2) + "\n");
  write_text(dir / "residuals.csv", residuals_csv(r.records));
  if (r.doc.contains("artifacts") && r.doc["artifacts"].contains("rays")) write_text(dir / "rays.csv", r.rays_csv);
  if (r.doc.contains("artifacts") && r.doc["artifacts"].contains("jacobi")) write_text(dir / "jacobi.csv", r.jacobi_csv);
}

// --- suites --------------------------------------------------------------------------

namespace suites {

using checks::Records;
using checks::record;

struct Output {
  Records records;
  json section = json::object();
  std::string rays_csv;
  std::string jacobi_csv;
};

inline std::string ray_id(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ray%03zu", k);
  return buf;
}

inline std::string ray_inputs(const LightRay& r) { return checks::describe(r.q) + "|" + checks::describe(r.v); }

inline std::string rays_table(const std::vector<LightRay>& rays, int m) {
  std::vector<RayCoords> coords;
  for (const auto& r : rays) coords.push_back(ray_coords(r));
  std::ostringstream os;
  write_rays_csv(os, coords, m);
  return os.str();
}

inline std::string empty_jacobi_header(int m) {
  std::ostringstream os;
  os << "field,t";
  for (int i = 0; i < m; ++i) os << ",J" << i;
  for (int i = 0; i < m; ++i) os << ",Jd" << i;
  os << ",pairing\n";
  return os.str();
}

inline std::vector<double> t_span(const Scenario& s, double lo, double hi) {
  if (!s.params.contains("t_span")) return {lo, hi};
  const json& t = s.params["t_span"];
  if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number() || t[0].get<double>() > 0.0 ||
      t[1].get<double>() < 0.0)
    throw ParseError(s.name + ": field 'params.t_span': expected [t_back <= 0, t_fwd >= 0]");
  return {t[0].get<double>(), t[1].get<double>()};
}

inline Output geodesic_demo(const Scenario& s, const std::vector<LightRay>& rays) {
  const auto span = t_span(s, -1.0, 1.0);
  const SpacetimeModel& model = rays.empty() ? build_metric(s) : rays.front().model();
  const bool flat = s.metric_kind == "minkowski";
  struct Row {
    Records rec;
    json row;
  };
  auto rows = parallel_map<Row>(rays.size(), [&](std::size_t k) {
    const LightRay& r = rays[k];
    const NullGeodesic g = chart_to_ray(r, {span[0], span[1]}, s.integrator.steps_per_unit);
    Row out;
    const std::string id = ray_id(k), in = ray_inputs(r);
    out.rec.push_back(record("geodesics.null_drift/" + id, in, null_drift(g), model.tol().tol_null_drift));
    if (flat) {
      double e = 0.0;
      for (const auto& n : g.nodes) e = std::max({e, (n.x - (r.event() + n.t * r.v)).norm(), (n.v - r.v).norm()});
      out.rec.push_back(record("geodesics.flat_exact/" + id, in, e, 1e-12));
    }
    out.row = {{"ray", id},
               {"q", std::vector<double>(r.q.data(), r.q.data() + r.q.size())},
               {"t_start", g.t_min()},
               {"t_end", g.t_max()},
               {"start", std::vector<double>(g.nodes.front().x.data(), g.nodes.front().x.data() + model.dim())},
               {"end", std::vector<double>(g.nodes.back().x.data(), g.nodes.back().x.data() + model.dim())},
               {"backward", to_string(g.backward.reason)},
               {"forward", to_string(g.forward.reason)}};
    return out;
  });
  Output o;
  json table = json::array();
  for (auto& r : rows) {
    o.records.insert(o.records.end(), r.rec.begin(), r.rec.end());
    table.push_back(r.row);
  }
  o.section["endpoints"] = table;
  o.rays_csv = rays_table(rays, model.dim());
  o.jacobi_csv = empty_jacobi_header(model.dim());
  return o;
}

inline Output jacobi_suite(const Scenario& s, const std::vector<LightRay>& rays) {
  const int spu = s.integrator.steps_per_unit;
  struct Row {
    Records rec;
    json row;
    std::string csv;
  };
  auto rows = parallel_map<Row>(rays.size(), [&](std::size_t k) {
    const LightRay& r = rays[k];
    const SpacetimeModel& model = r.model();
    const int m = model.dim();
    auto st = CounterRng(s.seed, "jacobi_suite/" + ray_id(k)).stream();
    const std::string id = ray_id(k), in = ray_inputs(r);
    Row out;
    const auto geo = std::make_shared<const NullGeodesic>(chart_to_ray(r, {0.0, 1.0}, spu));
    const Mat g = model.metric_raw(r.event());
    const Vec T = model.timelike_raw(r.event());
    JacobiInit init = fixtures::random_init(st, m);
    init.J0dot -= (inner(g, init.J0dot, r.v) / inner(g, T, r.v)) * T;
    const JacobiField J = integrate_jacobi(geo, init);
    out.rec.push_back(record("jacobi.pairing_linearity/" + id, in, affine_pairing_fit(J).residual, 1e-7));
    out.rec.push_back(record("jacobi.lightray_membership/" + id, in, std::abs(affine_pairing_fit(J).b),
                             model.tol().tol_lightray * (1.0 + std::abs(affine_pairing_fit(J).a))));
    const auto var = probes::random_variation(r, st);
    const auto e = probes::variation_oracle_errors(var, lightrays::detail::jacobi_generator, spu);
    out.rec.push_back(record("jacobi.variation_oracle/" + id + "/order", in, checks::detail::order_min(e.errors), 1.9, ">="));
    out.rec.push_back(record("jacobi.variation_oracle/" + id + "/initial_values_order", in,
                             checks::detail::order_min(e.init_defects), 1.9, ">="));
    out.rec.push_back(record("jacobi.variation_oracle/" + id + "/abs_error", in, e.errors.back(), 1e-5));
    out.rec.push_back(record("jacobi.reparametrization_invariance/" + id, in,
                             probes::reparametrization_defect(var, s.integrator.ds, spu), 1e-6));
    const JacobiClass c = mod_gamma_reduce(*geo, init);
    out.row = {{"ray", id},
               {"pairing_a", affine_pairing_fit(J).a},
               {"pairing_b", affine_pairing_fit(J).b},
               {"class_w_norm", c.w.norm()},
               {"class_wdot_norm", c.wdot.norm()},
               {"oracle_errors", json(e.errors)}};
    std::ostringstream os;
    write_jacobi_csv(os, J, false, id);
    out.csv = os.str();
    return out;
  });
  Output o;
  o.section["fields"] = json::array();
  const int m = rays.empty() ? 2 : rays.front().model().dim();
  o.jacobi_csv = empty_jacobi_header(m);
  for (auto& r : rows) {
    o.records.insert(o.records.end(), r.rec.begin(), r.rec.end());
    o.section["fields"].push_back(r.row);
    o.jacobi_csv += r.csv;
  }
  o.rays_csv = rays_table(rays, m);
  return o;
}

inline Output conformal_invariance(const Scenario& s, const std::vector<LightRay>& rays) {
  const int m = rays.empty() ? 2 : rays.front().model().dim();
  Expression sigma_bar = fixtures::sigma_bar(std::max(m, 3));
  if (s.params.contains("sigma_bar")) {
    if (!s.params["sigma_bar"].is_string()) throw ParseError(s.name + ": field 'params.sigma_bar': expected a string");
    sigma_bar = Expression::parse(s.params["sigma_bar"].get<std::string>());
  }
  struct Row {
    Records rec;
    json row;
  };
  auto rows = parallel_map<Row>(rays.size(), [&](std::size_t k) {
    const LightRay& r = rays[k];
    auto st = CounterRng(s.seed, "conformal_invariance/" + ray_id(k)).stream();
    const std::string id = ray_id(k), in = ray_inputs(r);
    const auto var = probes::random_variation(r, st);
    const double d = probes::conformal_class_defect(var, sigma_bar, {0.0, 0.5, 1.0}, s.integrator.ds,
                                                     s.integrator.steps_per_unit);
    const double h = probes::conformal_hyperplane_defect(r, sigma_bar);
    Row out;
    out.rec.push_back(record("jacobi.conformal_invariance/" + id, in, d, 1e-6));
    out.rec.push_back(record("contact.hyperplane_invariance/" + id + "/conformal", in, h, 1e-10));
    out.row = {{"ray", id}, {"class_distance", d}, {"hyperplane_defect", h}};
    return out;
  });
  Output o;
  o.section["sigma_bar"] = sigma_bar.to_string();
  o.section["rays"] = json::array();
  for (auto& r : rows) {
    o.records.insert(o.records.end(), r.rec.begin(), r.rec.end());
    o.section["rays"].push_back(r.row);
  }
  o.rays_csv = rays_table(rays, m);
  o.jacobi_csv = empty_jacobi_header(m);
  return o;
}

inline Output contact_suite(const Scenario& s, const std::vector<LightRay>& rays) {
  struct Row {
    Records rec;
    json row;
  };
  auto rows = parallel_map<Row>(rays.size(), [&](std::size_t k) {
    const LightRay& r = rays[k];
    const SpacetimeModel& model = r.model();
    const int m = model.dim();
    auto st = CounterRng(s.seed, "contact_suite/" + ray_id(k)).stream();
    const std::string id = ray_id(k), in = ray_inputs(r);
    Row out;
    const ContactFrame f = contact_frame(r);
    const auto rep = nondegeneracy_report(f, model.tol().tol_contact);
    out.rec.push_back(record("contact.nondegeneracy/" + id, in, rep.min_singular_value, model.tol().tol_contact, ">"));
    out.rec.push_back(record("lightrays.chart_dimension/" + id + "/contact_frame", in,
                             static_cast<double>(f.basis.size()), 2.0 * m - 4, "=="));
    out.rec.push_back(record("contact.gauge_independence/" + id, in, probes::gauge_defect(r, st), 1e-10));
    const auto kt = probes::kernel_transverse(r);
    out.rec.push_back(record("contact.kernel_transverse/" + id + "/rank_increase", in,
                             kt.extended_span_rank - kt.frame_span_rank, 1.0, "=="));
    out.rec.push_back(record("contact.kernel_transverse/" + id + "/kernel_theta0", in, kt.kernel_theta, 1e-3, ">="));
    double sc = 0.0;
    for (double lambda : {0.5, 3.0}) sc = std::max(sc, scale_invariance_check(r, lambda, s.seed));
    out.rec.push_back(record("contact.hyperplane_invariance/" + id + "/rescaling", in, sc, 1e-10));
    const Vec dir = fixtures::random_unit(st, ray_coords_size(m));
    out.rec.push_back(record("contact.two_path_theta/" + id, in, probes::two_path_theta_defect(r, dir, 0.5, s.integrator.ds), 1e-8));
    out.rec.push_back(record("contact.omega0_antisymmetry/" + id, in,
                             probes::antisymmetry_defect(r, st, probes::omega0_reference), 1e-14));
    out.row = {{"ray", id}, {"det", rep.det}, {"min_singular_value", rep.min_singular_value}, {"frame_size", f.basis.size()}};
    return out;
  });
  Output o;
  o.section["frames"] = json::array();
  double min_sv = std::numeric_limits<double>::infinity();
  for (auto& r : rows) {
    o.records.insert(o.records.end(), r.rec.begin(), r.rec.end());
    min_sv = std::min(min_sv, r.row["min_singular_value"].get<double>());
    o.section["frames"].push_back(r.row);
  }
  if (!rows.empty()) o.section["min_singular_value"] = min_sv;
  const int m = rays.empty() ? 2 : rays.front().model().dim();
  o.rays_csv = rays_table(rays, m);
  o.jacobi_csv = empty_jacobi_header(m);
  return o;
}

inline Output reduction_suite(const Scenario& s, const std::vector<LightRay>& rays) {
  struct Row {
    Records rec;
    json row;
  };
  auto rows = parallel_map<Row>(rays.size(), [&](std::size_t k) {
    const LightRay& r = rays[k];
    const SpacetimeModel& model = r.model();
    const std::string id = ray_id(k), in = ray_inputs(r);
    const GeodesicState ns{r.event(), r.v};
    Row out;
    const std::uint64_t seed = s.seed + k;
    const double sk = spray_kernel_check(model, ns, 50, seed);
    const double ctrl = spray_kernel_control(model, ns, 50, seed);
    out.rec.push_back(record("contact.spray_kernel/" + id, in, sk, 1e-8));
    out.rec.push_back(record("contact.spray_kernel/" + id + "/planted_violation", in, ctrl, 1e-3, ">="));
    std::vector<double> ex, ed;
    for (double d : {4e-3, 2e-3, 1e-3}) {
      const auto h = hamiltonian_intertwine_check(model, ns, d);
      ex.push_back(h.r_x);
      ed.push_back(h.r_delta);
    }
    out.rec.push_back(record("contact.hamiltonian_intertwine/" + id + "/spray", in, ex.back(), 1e-6));
    out.rec.push_back(record("contact.hamiltonian_intertwine/" + id + "/euler", in, ed.back(), 1e-6));
    // Orders are meaningful only above rounding level.
    for (const auto& [name, e] : {std::pair{"spray", ex}, std::pair{"euler", ed}})
      if (e.back() > 1e-12)
        out.rec.push_back(record("contact.hamiltonian_intertwine/" + id + "/" + name + "_order", in,
                                 checks::detail::order_min(e), 1.9, ">="));
    double lv = 0.0;
    for (double sc : {0.1, 0.5}) lv = std::max(lv, liouville_check(model, ns, sc, 8, seed));
    out.rec.push_back(record("contact.liouville/" + id, in, lv, 1e-8));
    out.row = {{"ray", id}, {"spray_kernel", sk}, {"control", ctrl}, {"r_x", ex}, {"r_delta", ed}, {"liouville", lv}};
    return out;
  });
  Output o;
  o.section["states"] = json::array();
  for (auto& r : rows) {
    o.records.insert(o.records.end(), r.rec.begin(), r.rec.end());
    o.section["states"].push_back(r.row);
  }
  const int m = rays.empty() ? 2 : rays.front().model().dim();
  o.rays_csv = rays_table(rays, m);
  o.jacobi_csv = empty_jacobi_header(m);
  return o;
}

inline Output nonhausdorff(const Scenario& s, const SpacetimeModel& model) {
  int n_max = 12;
  if (s.params.contains("n_max")) {
    if (!s.params["n_max"].is_number_integer() || s.params["n_max"].get<int>() < 1 || s.params["n_max"].get<int>() > 30)
      throw ParseError(s.name + ": field 'params.n_max': expected an integer in [1, 30]");
    n_max = s.params["n_max"].get<int>();
  }
  const checks::NonHausdorffSection sec = checks::nonhausdorff_demo(model, n_max);
  Output o;
  o.records = sec.records;
  json approx = json::array();
  std::ostringstream rays;
  rays.precision(17);
  rays << "n,tau,q_slice0,q_slice2\n";
  for (const auto& a : sec.approximants) {
    approx.push_back({{"n", a.n}, {"tau", a.tau}, {"segments", a.segment_count}, {"q_slice0", a.q_slice0}, {"q_slice2", a.q_slice2}});
    rays << a.n << "," << a.tau << "," << a.q_slice0 << "," << a.q_slice2 << "\n";
  }
  json limit = json::array();
  for (std::size_t i = 0; i < sec.limit_segments.size(); ++i) {
    const auto& seg = sec.limit_segments[i];
    limit.push_back({{"s_begin", seg.s_begin},
                     {"s_end", seg.s_end},
                     {"end_reason", seg.end_reason},
                     {"slices_crossed", sec.limit_crossings[i]},
                     {"q", sec.limit_q[i]}});
    rays << "limit" << i + 1 << ",0," << (i == 0 ? sec.limit_q[i] : std::nan("")) << ","
         << (i == 1 ? sec.limit_q[i] : std::nan("")) << "\n";
  }
  o.section["approximants"] = approx;
  o.section["limit_segments"] = limit;
  o.section["distinct_limit_rays"] = limit.size();
  o.rays_csv = rays.str();
  o.jacobi_csv = empty_jacobi_header(2);
  return o;
}

}  // namespace suites

inline Report run_scenario(const Scenario& s) {
  const auto t0 = std::chrono::steady_clock::now();
  suites::Output out;
  try {
    const SpacetimeModel model = build_metric(s);
    if (s.kind == "nonhausdorff_demo") {
      out = suites::nonhausdorff(s, model);
    } else {
      const auto chart = build_scenario_chart(s, model);
      const auto rays = scenario_rays(s, chart);
      if (rays.empty()) throw ParseError(s.name + ": field 'rays': the scenario selects no rays");
      if (s.kind == "geodesic_demo") out = suites::geodesic_demo(s, rays);
      else if (s.kind == "jacobi_suite") out = suites::jacobi_suite(s, rays);
      else if (s.kind == "conformal_invariance") out = suites::conformal_invariance(s, rays);
      else if (s.kind == "contact_suite") out = suites::contact_suite(s, rays);
      else out = suites::reduction_suite(s, rays);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    std::string_view what = e.what();
    if (what.starts_with(e.kind() + ": ")) what.remove_prefix(e.kind().size() + 2);
    throw Error(e.kind(), "scenario '" + s.name + "' (" + s.kind + ", metric " + s.metric_kind + "): " + std::string(what));
  }
  Report r;
  r.records = std::move(out.records);
  sort_records(r.records);
  r.pass = !r.records.empty() &&
           std::all_of(r.records.begin(), r.records.end(), [](const auto& rec) { return rec.pass; });
  json recs = json::array();
  for (const auto& rec : r.records) recs.push_back(record_json(rec));
  r.doc = {{"schema_version", kSchemaVersion},
           {"scenario", s.echo},
           {"records", recs},
           {"pass", r.pass},
           {"sections", out.section},
           {"artifacts", {{"report", "report.json"}, {"residuals", "residuals.csv"}, {"rays", "rays.csv"}, {"jacobi", "jacobi.csv"}}},
           {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  r.rays_csv = std::move(out.rays_csv);
  r.jacobi_csv = std::move(out.jacobi_csv);
  return r;
}

// --- check_all -----------------------------------------------------------------------

// Small built-in scenarios for the determinism check.
inline const std::vector<std::string>& determinism_scenarios() {
  static const std::vector<std::string> docs{
      R"json({"schema_version": 1, "name": "determinism_contact", "kind": "contact_suite",
          "metric": {"kind": "conformal_flat", "params": {"m": 3, "sigma": "0.2*sin(x1) + 0.1*sin(x0 + x2)"}},
          "seed": 5, "rays": {"count": 3}})json",
      R"json({"schema_version": 1, "name": "determinism_jacobi", "kind": "jacobi_suite",
          "metric": {"kind": "conformal_flat", "params": {"m": 4, "sigma": "0.15*sin(x1) + 0.1*sin(x2 + x3) + 0.05*x0"}},
          "seed": 9, "rays": {"count": 2}})json",
  };
  return docs;
}

inline std::vector<checks::CheckEntry> cli_entries() {
  checks::CheckEntry determinism{"cli.determinism", "cli", "cli.determinism", [](const checks::CheckContext&) {
                                   checks::Records out;
                                   for (const auto& doc : determinism_scenarios()) {
                                     const Scenario s = parse_scenario(doc, "builtin");
                                     const std::string a = canonical_dump(run_scenario(s).doc);
                                     const std::string b = canonical_dump(run_scenario(s).doc);
                                     out.push_back(checks::record("cli.determinism/" + s.name, doc,
                                                                  a == b ? 0.0 : 1.0, 0.0, "=="));
                                   }
                                   return out;
                                 }};
  checks::CheckEntry coverage{"cli.coverage", "cli", "cli.coverage", [](const checks::CheckContext&) {
                                auto entries = checks::module_entries();
                                auto cli = std::vector<checks::CheckEntry>{{"cli.determinism", "cli", "cli.determinism", {}},
                                                                           {"cli.coverage", "cli", "cli.coverage", {}}};
                                entries.insert(entries.end(), cli.begin(), cli.end());
                                double bad = 0.0;
                                try {
                                  checks::assert_coverage(entries);
                                } catch (const CoverageError&) {
                                  bad = 1.0;
                                }
                                return checks::Records{checks::record("cli.coverage", "manifest", bad, 0.0, "==")};
                              }};
  return {determinism, coverage};
}

inline std::vector<checks::CheckEntry> check_matrix() {
  auto entries = checks::module_entries();
  auto cli = cli_entries();
  entries.insert(entries.end(), cli.begin(), cli.end());
  return entries;
}

inline Report check_all(std::uint64_t seed = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto entries = check_matrix();
  checks::assert_coverage(entries);
  const checks::CheckContext ctx{seed};
  auto results = parallel_map<checks::Records>(entries.size(),
                                               [&](std::size_t i) { return checks::run_entry(entries[i], ctx); });
  Report r;
  json manifest = json::array();
  for (const auto& inv : checks::invariant_manifest()) {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.invariant == inv.id; });
    manifest.push_back({{"invariant", inv.id}, {"statement", inv.statement}, {"entry", it->id}});
  }
  json summary = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool ok = std::all_of(results[i].begin(), results[i].end(), [](const auto& rec) { return rec.pass; });
    summary.push_back({{"entry", entries[i].id}, {"module", entries[i].module}, {"records", results[i].size()}, {"pass", ok}});
    r.records.insert(r.records.end(), results[i].begin(), results[i].end());
  }
  sort_records(r.records);
  r.pass = std::all_of(r.records.begin(), r.records.end(), [](const auto& rec) { return rec.pass; });
  json recs = json::array();
  for (const auto& rec : r.records) recs.push_back(record_json(rec));
  r.doc = {{"schema_version", kSchemaVersion},
           {"scenario", {{"kind", "check_all"}, {"seed", seed}}},
           {"records", recs},
           {"pass", r.pass},
           {"sections", {{"manifest", manifest}, {"entries", summary}}},
           {"artifacts", {{"report", "report.json"}, {"residuals", "residuals.csv"}}},
           {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  return r;
}

}  // namespace lightrays::scenario

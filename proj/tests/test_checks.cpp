#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "lightrays/scenario.hpp"

using namespace lightrays;
using checks::CheckEntry;
using checks::Records;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Records ok(const checks::CheckContext&) { return {checks::record("ok", "", 0.0, 1.0)}; }

std::vector<CheckEntry> full_matrix_stub() {
  std::vector<CheckEntry> out;
  for (const auto& inv : checks::invariant_manifest()) out.push_back({inv.id, "stub", inv.id, ok});
  return out;
}

}  // namespace

TEST_CASE("record relations, NaN never passes") {
  CHECK(checks::record("a", "x", 1e-9, 1e-8).pass);
  CHECK_FALSE(checks::record("a", "x", 1e-7, 1e-8).pass);
  CHECK(checks::record("a", "x", 2.0, 1.9, ">=").pass);
  CHECK_FALSE(checks::record("a", "x", 1.0, 1.0, "<").pass);
  CHECK(checks::record("a", "x", 1.0, 0.0, ">").pass);
  CHECK(checks::record("a", "x", 4.0, 4.0, "==").pass);
  CHECK_FALSE(checks::record("a", "x", 3.0, 4.0, "==").pass);
  for (const char* rel : {"<=", "<", ">=", ">", "=="}) CHECK_FALSE(checks::record("a", "x", kNaN, 1.0, rel).pass);
  CHECK_FALSE(checks::record("a", "x", 0.0, 1.0, "~").pass);
}

TEST_CASE("digest is stable FNV-1a") {
  CHECK(checks::digest("") == "cbf29ce484222325");
  CHECK(checks::digest("a") == "af63dc4c8601ec8c");
  CHECK(checks::record("a", "in", 0, 1).inputs_digest == checks::digest("in"));
}

TEST_CASE("Sweep keeps the worst case") {
  checks::Sweep up("u", 1.0);
  for (double r : {0.1, 0.7, 0.3}) up.add(r, "x");
  CHECK(up.count() == 3);
  CHECK(up.result().residual == 0.7);
  CHECK(up.result().pass);

  checks::Sweep low("l", 1.9, ">=");
  for (double r : {2.0, 1.95, 2.1}) low.add(r, "x");
  CHECK(low.result().residual == 1.95);
  low.add(1.5, "y");
  CHECK_FALSE(low.result().pass);

  checks::Sweep eq("e", 4.0, "==");
  for (double r : {4.0, 3.0, 5.0}) eq.add(r, "x");
  CHECK(eq.result().residual == 3.0);

  checks::Sweep nan("n", 1.0);
  nan.add(0.1, "x");
  nan.add(kNaN, "y");
  nan.add(0.2, "z");
  CHECK(std::isnan(nan.result().residual));
  CHECK_FALSE(nan.result().pass);

  CHECK_FALSE(checks::Sweep("empty", 1.0).result().pass);
}

TEST_CASE("coverage: each manifest invariant exactly once") {
  CHECK_NOTHROW(checks::assert_coverage(full_matrix_stub()));
  CHECK_NOTHROW(checks::assert_coverage(scenario::check_matrix()));

  auto missing = full_matrix_stub();
  missing.erase(missing.begin() + 3);
  CHECK_THROWS_AS(checks::assert_coverage(missing), CoverageError);

  auto twice = full_matrix_stub();
  twice.push_back({"other.id", "stub", twice.front().invariant, ok});
  CHECK_THROWS_AS(checks::assert_coverage(twice), CoverageError);

  auto dup_id = full_matrix_stub();
  dup_id.push_back({dup_id.front().id, "stub", "", ok});
  CHECK_THROWS_AS(checks::assert_coverage(dup_id), CoverageError);

  auto unknown = full_matrix_stub();
  unknown.push_back({"x.y", "stub", "x.unknown", ok});
  CHECK_THROWS_AS(checks::assert_coverage(unknown), CoverageError);

  auto extra = full_matrix_stub();
  extra.push_back({"x.extra", "stub", "", ok});
  CHECK_NOTHROW(checks::assert_coverage(extra));
}

TEST_CASE("run_entry turns errors and empty results into failing records") {
  const CheckEntry thrower{"t.throw", "t", "", [](const checks::CheckContext&) -> Records {
                             throw NotNull("planted");
                           }};
  const Records r = checks::run_entry(thrower, {});
  REQUIRE(r.size() == 1);
  CHECK(r[0].check_id == "t.throw/error");
  CHECK_FALSE(r[0].pass);
  CHECK(r[0].note.find("planted") != std::string::npos);

  const CheckEntry empty{"t.empty", "t", "", [](const checks::CheckContext&) { return Records{}; }};
  const Records e = checks::run_entry(empty, {});
  REQUIRE(e.size() == 1);
  CHECK_FALSE(e[0].pass);
}

TEST_CASE("planted Christoffel sign bug breaks the variation oracle") {
  const auto fx = fixtures::conf(3);
  auto st = CounterRng(21, "mutation_test").stream();
  const LightRay ray = fixtures::random_ray(fx, st);
  const auto var = probes::random_variation(ray, st);
  const auto good = probes::variation_oracle_errors(var);
  const auto bad = probes::variation_oracle_errors(var, probes::gamma_sign_mutant);
  CHECK(checks::record("oracle", "", good.errors.back(), 1e-5).pass);
  CHECK(checks::record("order", "", probes::observed_order(good.errors), 1.9, ">=").pass);
  CHECK_FALSE(checks::record("oracle", "", bad.errors.back(), 1e-5).pass);
  CHECK_FALSE(checks::record("order", "", probes::observed_order(bad.errors), 1.9, ">=").pass);
}

TEST_CASE("planted symmetrized omega_0 fails antisymmetry") {
  for (const auto& fx : fixtures::standard()) {
    auto st = CounterRng(22, "omega_mutation/" + fx.name).stream();
    const LightRay ray = fixtures::random_ray(fx, st);
    CHECK(probes::antisymmetry_defect(ray, st, probes::omega0_reference) <= 1e-14);
    CHECK(probes::antisymmetry_defect(ray, st, probes::omega0_symmetrized_mutant) >= 1e-3);
  }
}

TEST_CASE("non-Hausdorff demo: two limit segments split at the puncture") {
  const auto sec = checks::nonhausdorff_demo(punctured_minkowski2());
  REQUIRE(sec.approximants.size() == 12);
  for (const auto& a : sec.approximants) {
    CHECK(a.segment_count == 1);
    CHECK(a.tau == Catch::Approx(std::ldexp(1.0, -a.n)));
    CHECK(std::abs(a.q_slice0 - sec.limit_q[0]) <= a.tau + 1e-12);
    CHECK(std::abs(a.q_slice2 - sec.limit_q[1]) <= a.tau + 1e-12);
  }
  REQUIRE(sec.limit_segments.size() == 2);
  CHECK(sec.limit_segments[0].end_reason == "exclusion_hit");
  CHECK(sec.limit_segments[1].end_reason == "interval_end");
  CHECK(std::abs(sec.limit_segments[0].s_end - 1.0) <= 1e-3);
  CHECK(std::abs(sec.limit_segments[1].s_begin - 1.0) <= 1e-3);
  CHECK(sec.limit_segments[0].s_end < sec.limit_segments[1].s_begin);
  CHECK(sec.limit_crossings == std::vector<int>{1, 1});
  for (const auto& r : sec.records) CHECK(r.pass);
}

TEST_CASE("non-Hausdorff demo rejects other metrics") {
  CHECK_THROWS_AS(checks::nonhausdorff_demo(minkowski(2)), WrongMetric);
  CHECK_THROWS_AS(checks::nonhausdorff_demo(minkowski_ball3()), WrongMetric);
}

TEST_CASE("maximal segments of an unobstructed line are a single segment") {
  const auto model = punctured_minkowski2();
  Vec p(2), v(2);
  p << 0.0, 0.5;
  v << 1.0, 1.0;
  const auto segs = checks::maximal_segments(model, p, v, -0.5, 3.0);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].s_begin == Catch::Approx(-0.5));
  CHECK(segs[0].s_end == Catch::Approx(3.0));
}

TEST_CASE("every module entry passes at the default seed") {
  for (const auto& e : checks::module_entries()) {
    INFO(e.id);
    for (const auto& r : checks::run_entry(e, {})) {
      INFO(r.check_id << " residual " << r.residual << " " << r.relation << " " << r.tolerance << " " << r.note);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("module entries pass at another seed") {
  for (const auto& e : checks::module_entries()) {
    INFO(e.id);
    for (const auto& r : checks::run_entry(e, {7})) {
      INFO(r.check_id << " residual " << r.residual << " " << r.relation << " " << r.tolerance << " " << r.note);
      CHECK(r.pass);
    }
  }
}

// Acceptance run: one PASS/FAIL line per criterion, each backed by entries of
// the check_all matrix, then the full matrix with its wall time.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lightrays/scenario.hpp"

namespace {

using lightrays::checks::CheckEntry;
using lightrays::checks::Records;

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> entries;
  double max_seconds;  // runtime bound, 0 when the criterion sets none
};

const CheckEntry* find_entry(const std::vector<CheckEntry>& all, const std::string& id) {
  for (const auto& e : all)
    if (e.id == id) return &e;
  return nullptr;
}

}  // namespace

int main() {
  namespace sc = lightrays::scenario;
  const auto all = sc::check_matrix();
  const std::vector<Criterion> criteria{
      {1, "flat exactness of geodesics and Jacobi fields", {"geodesics.flat_exact", "jacobi.flat_exact"}, 1.0},
      {2, "Jacobi linear pairing over >= 100 triples", {"jacobi.pairing_linearity"}, 0},
      {3, "variation oracle order and absolute agreement", {"jacobi.variation_oracle"}, 0},
      {4, "conformal invariance of classes on >= 20 fixtures", {"jacobi.conformal_invariance"}, 0},
      {5, "reparametrization closed forms and geodesic residual",
       {"geodesics.reparametrize_closed_form", "geodesics.reparametrize_residual"}, 0},
      {6, "contact nondegeneracy and flat m=3 gram", {"contact.nondegeneracy"}, 0},
      {7, "dimension bookkeeping", {"lightrays.chart_dimension"}, 0},
      {8, "reduction identities", {"contact.spray_kernel", "contact.hamiltonian"}, 0},
      {9, "two-path theta0 consistency on >= 50 pairs", {"contact.two_path_theta"}, 0},
      {10, "non-Hausdorff limit of light rays", {"nonhausdorff.example"}, 0},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::size_t n = 0;
    std::string detail;
    for (const auto& id : c.entries) {
      const CheckEntry* e = find_entry(all, id);
      if (!e) {
        pass = false;
        detail += " missing entry " + id;
        continue;
      }
      const Records recs = lightrays::checks::run_entry(*e, {1});
      n += recs.size();
      if (recs.empty()) pass = false;
      for (const auto& r : recs)
        if (!r.pass) {
          pass = false;
          detail += " " + r.check_id + "=" + std::to_string(r.residual);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0 && secs >= c.max_seconds) {
      pass = false;
      detail += " runtime over " + std::to_string(c.max_seconds) + " s";
    }
    all_pass = all_pass && pass;
    std::printf("%s criterion %d: %s (%zu records, %.3f s)%s\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(), n,
                secs, detail.c_str());
  }

  const sc::Report full = sc::check_all();
  const double secs = full.doc["wall_time_s"].get<double>();
  const bool suite_ok = full.pass && secs < 300.0;
  all_pass = all_pass && suite_ok;
  std::printf("%s check-all: %zu records, %.3f s (bound 300 s)\n", suite_ok ? "PASS" : "FAIL", full.records.size(),
              secs);
  return all_pass ? 0 : 1;
}

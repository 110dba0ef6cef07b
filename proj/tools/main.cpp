// lightrays: run scenario files, the full check matrix, or list the metric catalog.
// Exit status: 0 all checks pass, 1 some check fails, 2 the input or a module errored.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "lightrays/scenario.hpp"

namespace sc = lightrays::scenario;
namespace fs = std::filesystem;

namespace {

int summarize(const sc::Report& r, const std::string& label, const fs::path& out) {
  std::size_t failed = 0;
  for (const auto& rec : r.records)
    if (!rec.pass) {
      ++failed;
      std::cout << "FAIL " << rec.check_id << " residual=" << rec.residual << " " << rec.relation << " "
                << rec.tolerance << (rec.note.empty() ? "" : " (" + rec.note + ")") << "\n";
    }
  std::cout << label << ": " << (r.pass ? "PASS" : "FAIL") << " " << r.records.size() - failed << "/"
            << r.records.size() << " records, " << r.doc["wall_time_s"].get<double>() << " s, output in "
            << out.string() << "\n";
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-ray space toolkit: scenarios, property checks and metric catalog"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string run_out;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one scenario file and write report.json and CSV artifacts");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory (default out/<scenario name>)");
  run->add_option("--seed", seed, "Override the scenario seed");

  std::string check_out = "out/check_all";
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check-all", "Run every registered property check");
  check->add_option("--out", check_out, "Output directory")->capture_default_str();
  check->add_option("--seed", check_seed, "Seed for the randomized checks")->capture_default_str();

  auto* list = app.add_subcommand("list-metrics", "Print the metric catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const auto& m : sc::metric_catalog())
        std::cout << m.kind << "\n  params: " << m.params << "\n  " << m.description << "\n";
      return 0;
    }
    if (*run) {
      sc::Scenario s = sc::load_scenario(scenario_path);
      if (seed) sc::set_seed(s, *seed);
      const fs::path out = run_out.empty() ? fs::path("out") / s.name : fs::path(run_out);
      const sc::Report r = sc::run_scenario(s);
      sc::write_report(r, out);
      return summarize(r, s.name, out);
    }
    const sc::Report r = sc::check_all(check_seed);
    sc::write_report(r, check_out);
    return summarize(r, "check-all", check_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fockflow/harness.hpp"
#include "fockflow/types.hpp"

namespace {

using fockflow::SuiteReport;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void print_summary(const SuiteReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  int failed = 0;
  for (const auto& c : report.cases) {
    if (c.passed) continue;
    ++failed;
    std::cout << "FAIL " << c.name << ": defect " << fockflow::csv_number(c.defect)
              << " > tolerance " << fockflow::csv_number(c.tolerance) << '\n';
  }
  for (const auto& r : report.convergence) {
    std::cout << (!r.required ? "info " : r.passed ? "ok   " : "FAIL ") << r.name << ": slope "
              << (r.slope ? fockflow::csv_number(*r.slope) : std::string("exact")) << '\n';
    if (r.required && !r.passed) ++failed;
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", report.seconds);
  std::cout << report.suite << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
            << report.cases.size() << " cases, " << report.convergence.size() << " sweeps, "
            << failed << " failed) in " << secs << " s\n";
}

std::string report_path_for(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".json");
  if (p == std::filesystem::path(out)) p += ".report.json";
  return p.string();
}

int run_scenario_command(fockflow::ScenarioKind kind, const std::string& config,
                         const std::string& sweep, const std::string& out,
                         const std::string& report_path) {
  const fockflow::ScenarioResult result = fockflow::run_scenario(kind, config, sweep);
  if (out.empty()) {
    std::cout << result.csv;
  } else {
    write_file(out, result.csv);
  }
  const std::string json_path = !report_path.empty() ? report_path
                                : out.empty()        ? std::string()
                                                     : report_path_for(out);
  if (!json_path.empty()) write_file(json_path, result.report.to_json().dump(2) + "\n");
  print_summary(result.report);
  return result.report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized quantum stochastic calculus: verification suites and scenarios"};
  app.require_subcommand(1);

  std::string suite, grids, out, report, config, sweep;
  std::uint64_t seed = 1000;
  double tol = fockflow::kExactTolerance;
  int samples = 100, threads = 0;

  auto* verify = app.add_subcommand("verify", "Run one verification suite");
  verify->add_option("--suite", suite, "Suite name")->required();
  verify->add_option("--grids", grids, "Comma-separated grid sizes, e.g. 2,4,8");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_option("--tol", tol, "Tolerance for exact identities");
  verify->add_option("--samples", samples, "Instances per randomized identity");
  verify->add_option("--threads", threads, "Worker threads (default FOCKFLOW_THREADS)");
  verify->add_option("--out", out, "JSON report path");

  auto* evolve = app.add_subcommand("evolve", "Sweep an evolution scenario over grid sizes");
  auto* flow = app.add_subcommand("flow", "Sweep a flow scenario over grid sizes");
  for (auto* cmd : {evolve, flow}) {
    cmd->add_option("--config", config, "Scenario JSON file")->required();
    cmd->add_option("--sweep", sweep, "Grid sizes as M=LIST, e.g. M=2,4,8 or M=1..16");
    cmd->add_option("--out", out, "CSV path (default stdout)");
    cmd->add_option("--report", report, "JSON report path (default: --out with .json)");
  }

  auto* norms = app.add_subcommand("norms", "Check the norm estimates on random instances");
  norms->add_option("--samples", samples, "Instances per estimate");
  norms->add_option("--seed", seed, "Base seed");
  norms->add_option("--threads", threads, "Worker threads (default FOCKFLOW_THREADS)");
  norms->add_option("--out", out, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve || *flow) {
      return run_scenario_command(*flow ? fockflow::ScenarioKind::flow
                                        : fockflow::ScenarioKind::evolution,
                                  config, sweep, out, report);
    }
    fockflow::SuiteOptions options;
    options.seed = seed;
    options.samples = samples;
    options.threads = threads;
    if (*verify) {
      options.tolerance = tol;
      if (!grids.empty()) options.grids = fockflow::parse_grid_list(grids);
    } else {
      suite = "norms";
    }
    const SuiteReport result = fockflow::run_suite(suite, options);
    if (!out.empty()) write_file(out, result.to_json().dump(2) + "\n");
    print_summary(result);
    return result.passed() ? 0 : 1;
  } catch (const fockflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}

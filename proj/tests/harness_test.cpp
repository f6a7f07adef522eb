#include <atomic>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fockflow/harness.hpp"
#include "fockflow/types.hpp"

using namespace fockflow;
using nlohmann::json;

namespace {

SuiteOptions small(std::vector<int> grids, std::uint64_t seed, int samples = 10) {
  SuiteOptions o;
  o.grids = std::move(grids);
  o.seed = seed;
  o.samples = samples;
  o.threads = 1;
  return o;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream cols(line);
    std::string cell;
    while (std::getline(cols, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

json scalar_scenario(int points, double h_time, cplx creation) {
  return json::parse(R"({"grid": {"points": 4, "t_max": 1.0}, "system": {"dim": 1},
                         "noise": {"dim": 1}, "hamiltonian": {}, "generator": {"kind": "hamiltonian"}})")
      .patch(json::array(
          {{{"op", "replace"}, {"path", "/grid/points"}, {"value", points}},
           {{"op", "add"}, {"path", "/hamiltonian/H+-"}, {"value", {{{h_time, 0.0}}}}},
           {{"op", "add"},
            {"path", "/hamiltonian/H+0"},
            {"value", {{{creation.real(), creation.imag()}}}}},
           {{"op", "add"},
            {"path", "/hamiltonian/H0-"},
            {"value", {{{creation.real(), -creation.imag()}}}}}}));
}

}  // namespace

TEST(Suites, UnknownSuiteListsTheValidNames) {
  try {
    (void)run_suite("foo");
    FAIL() << "expected an error";
  } catch (const UnknownSuiteError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("'foo'"), std::string::npos);
    for (const auto& name : suite_names()) EXPECT_NE(what.find(name), std::string::npos) << name;
  }
  EXPECT_EQ(suite_names().size(), 7u);
}

TEST(Suites, ExactIdentitiesOnThreePointsWithSeedSeven) {
  const SuiteReport r = run_suite("exact-identities", small({3}, 7, 20));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.cases.size(), 2u * 20 * 4 + 20u * 4);
  for (const auto& c : r.cases) {
    EXPECT_LE(c.defect, 1e-12) << c.name;
    EXPECT_NE(c.name.find("M=3"), std::string::npos) << c.name;
  }
  EXPECT_TRUE(r.criterion_passed(1));
  EXPECT_TRUE(r.criterion_passed(2));
  EXPECT_FALSE(r.criterion_passed(3));
}

TEST(Suites, AbsurdToleranceFailsHonestly) {
  SuiteOptions o = small({2}, 7, 3);
  o.tolerance = 1e-300;
  const SuiteReport r = run_suite("exact-identities", o);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.to_json(false)["passed"].get<bool>());
}

TEST(Suites, ReportsAreDeterministicAcrossRunsAndThreadCounts) {
  SuiteOptions o = small({1, 2}, 11, 6);
  const std::string first = run_suite("norms", o).to_json(false).dump();
  EXPECT_EQ(run_suite("norms", o).to_json(false).dump(), first);
  o.threads = 3;
  EXPECT_EQ(run_suite("norms", o).to_json(false).dump(), first);
  o.seed = 12;
  EXPECT_NE(run_suite("norms", o).to_json(false).dump(), first);
}

TEST(Suites, ValidatesGridSizes) {
  EXPECT_THROW((void)run_suite("exact-identities", small({5}, 1)), DomainError);
  EXPECT_THROW((void)run_suite("ito", small({2, 4}, 1)), DomainError);
  EXPECT_THROW((void)run_suite("ito", small({4, 2, 8}, 1)), DomainError);
  EXPECT_THROW((void)run_suite("flows", small({2, 4, 16}, 1)), DomainError);
  EXPECT_EQ(default_grids("multiplicativity"), (std::vector<int>{2, 4, 8, 16}));
}

TEST(Suites, PseudoFockSuiteCoversItsCriterion) {
  const SuiteReport r = run_suite("pseudo-fock", small({1, 2, 3}, 3, 12));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.criteria(), std::vector<int>{7});
  for (const auto& c : r.cases) {
    if (c.name.rfind("truncated-J-bound", 0) == 0) EXPECT_LE(c.defect, 0.0) << c.name;
  }
}

TEST(Report, JsonLayout) {
  const SuiteReport r = run_suite("pseudo-fock", small({1}, 5, 2));
  const json j = r.to_json();
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["suite"], "pseudo-fock");
  EXPECT_EQ(j["seed"], 5);
  ASSERT_FALSE(j["cases"].empty());
  const json& c = j["cases"][0];
  for (const char* key : {"name", "criterion", "inputs_digest", "defect", "tolerance", "passed", "seconds"}) {
    EXPECT_TRUE(c.contains(key)) << key;
  }
  EXPECT_EQ(c["inputs_digest"].get<std::string>().size(), 16u);
  EXPECT_TRUE(j.contains("timing"));
  EXPECT_FALSE(r.to_json(false).contains("timing"));
  EXPECT_FALSE(r.to_json(false)["cases"][0].contains("seconds"));
}

TEST(Convergence, FitsTheOrderAgainstDx) {
  ConvergenceRecord r;
  r.dx = {0.5, 0.25, 0.125, 0.0625};
  for (double h : r.dx) r.defects.push_back(3.0 * h * h);
  fit_convergence(r, 1e-12);
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_NEAR(*r.slope, 2.0, 1e-12);
  EXPECT_TRUE(r.passed);

  r.defects = {0.1, 0.1, 0.1, 0.1};
  fit_convergence(r, 1e-12);
  EXPECT_NEAR(*r.slope, 0.0, 1e-12);
  EXPECT_FALSE(r.passed);
}

TEST(Convergence, ExactDefectsPassWithoutASlope) {
  ConvergenceRecord r;
  r.dx = {0.5, 0.25, 0.125};
  r.defects = {0.0, 1e-15, 0.0};
  fit_convergence(r, 1e-12);
  EXPECT_FALSE(r.slope.has_value());
  EXPECT_TRUE(r.passed);
}

TEST(Convergence, NeedsThreePoints) {
  ConvergenceRecord r;
  r.dx = {0.5, 0.25};
  r.defects = {0.2, 0.1};
  fit_convergence(r, 1e-12);
  EXPECT_FALSE(r.slope.has_value());
  EXPECT_FALSE(r.passed);
}

TEST(Utilities, DigestIsFnv1a) {
  EXPECT_EQ(digest(""), "cbf29ce484222325");
  EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
}

TEST(Utilities, DerivedSeedsSeparateStreamsAndIndices) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(Utilities, CsvNumbersKeepSeventeenDigits) {
  EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
  EXPECT_EQ(csv_number(2.0), "2");
  EXPECT_EQ(csv_number(std::nan("")), "");
  EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Utilities, ParallelForVisitsEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](int i) {
                              if (i == 7) throw DomainError("boom");
                            }),
               DomainError);
  EXPECT_GE(resolve_threads(0), 1);
  EXPECT_EQ(resolve_threads(3), 3);
}

TEST(Sweep, ParsesListsAndRanges) {
  EXPECT_EQ(parse_sweep("M=2,4,8"), (std::vector<int>{2, 4, 8}));
  EXPECT_EQ(parse_sweep("M=1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_sweep("M=1..2,8"), (std::vector<int>{1, 2, 8}));
  EXPECT_TRUE(parse_sweep("").empty());
  EXPECT_TRUE(parse_sweep("M=").empty());
  EXPECT_THROW((void)parse_sweep("N=3"), DomainError);
  EXPECT_THROW((void)parse_sweep("M=4..2"), DomainError);
  EXPECT_THROW((void)parse_sweep("M=2,x"), DomainError);
  EXPECT_EQ(parse_grid_list("2, 4,8"), (std::vector<int>{2, 4, 8}));
  EXPECT_THROW((void)parse_grid_list("2,0"), DomainError);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  try {
    (void)parse_config_text("{\n  \"grid\": {\"points\": 4,}\n}\n");
    FAIL() << "expected an error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 24);
    EXPECT_EQ(std::string(e.what()).rfind("line 2, column 24: ", 0), 0u) << e.what();
  }
  EXPECT_NO_THROW((void)parse_config_text("// comment\n{\"grid\": {\"points\": 2}}"));
  EXPECT_THROW((void)load_config("/nonexistent/scenario.json"), ConfigError);
}

TEST(Config, SchemaViolationsNameTheKey) {
  auto message = [](const json& config) {
    try {
      (void)run_scenario(ScenarioKind::evolution, config, {});
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  json c = scalar_scenario(2, 1.0, 0.0);
  json missing = c;
  missing["grid"].erase("points");
  EXPECT_NE(message(missing).find("grid.points"), std::string::npos);
  json shape = c;
  shape["hamiltonian"]["H00"] = json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})})});
  EXPECT_NE(message(shape).find("hamiltonian.H00: expected a 1 x 1 matrix, got 1 x 2"),
            std::string::npos);
  json kind = c;
  kind["generator"]["kind"] = "bogus";
  EXPECT_NE(message(kind).find("generator.kind"), std::string::npos);
  json weights = c;
  weights["grid"]["weights"] = json::array({0.5});
  EXPECT_NE(message(weights).find("grid.weights"), std::string::npos);
}

TEST(Scenario, LebesgueVacuumAmplitudeApproachesThePhase) {
  const ScenarioResult r = run_scenario(ScenarioKind::evolution, scalar_scenario(4, 1.0, 0.0),
                                        {1, 2, 4, 8, 16});
  const auto rows = csv_rows(r.csv);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"M", "dx", "unitarity_defect", "vacuum_amplitude_re",
                                               "vacuum_amplitude_im", "slope_estimate"}));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const int m = std::stoi(rows[k][0]);
    const double w = 1.0 / m;
    const cplx amplitude{std::stod(rows[k][3]), std::stod(rows[k][4])};
    EXPECT_LE(std::abs(amplitude - std::pow(cplx{1.0, -w}, m)), 1e-12) << m;
    EXPECT_LE(std::abs(amplitude - std::exp(cplx{0.0, -1.0})), 2.0 * w) << m;
    // |1 - iw|^(2m) - 1 for the diagonal unitarity defect.
    EXPECT_NEAR(std::stod(rows[k][2]), std::pow(1.0 + w * w, m) - 1.0, 1e-12) << m;
  }
  EXPECT_TRUE(r.report.passed());
  ASSERT_EQ(r.report.convergence.size(), 1u);
  EXPECT_GE(*r.report.convergence[0].slope, 0.8);
}

TEST(Scenario, BrownianUnitarityDefectHalvesPerRefinement) {
  const ScenarioResult r = run_scenario(ScenarioKind::evolution,
                                        scalar_scenario(4, 0.0, cplx{0.0, -1.0}), {2, 4, 8, 16});
  const auto rows = csv_rows(r.csv);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t k = 2; k < rows.size(); ++k) {
    const double ratio = std::stod(rows[k - 1][2]) / std::stod(rows[k][2]);
    EXPECT_GT(ratio, 1.7) << rows[k][0];
    EXPECT_LT(ratio, 2.3) << rows[k][0];
    EXPECT_FALSE(rows[k][5].empty());
  }
  EXPECT_TRUE(rows[1][5].empty());
  EXPECT_TRUE(r.report.passed());
}

TEST(Scenario, EmptySweepGivesASingleGridReport) {
  const ScenarioResult r = run_scenario(ScenarioKind::evolution, scalar_scenario(3, 1.0, 0.0), {});
  const auto rows = csv_rows(r.csv);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "3");
  EXPECT_TRUE(r.report.convergence.empty());
  EXPECT_EQ(r.report.cases.size(), 1u);
}

TEST(Scenario, NonPseudoHermitianHamiltonianWarnsButRuns) {
  json c = scalar_scenario(2, 1.0, cplx{0.3, 0.0});
  c["hamiltonian"]["H0-"] = json::array({json::array({json::array({0.7, 0.0})})});
  const ScenarioResult r = run_scenario(ScenarioKind::evolution, c, {2, 4, 8});
  ASSERT_FALSE(r.report.warnings.empty());
  EXPECT_NE(r.report.warnings[0].find("not pseudo-Hermitian"), std::string::npos);
  ASSERT_EQ(r.report.convergence.size(), 1u);
  EXPECT_FALSE(r.report.convergence[0].required);
  EXPECT_EQ(csv_rows(r.csv).size(), 4u);
}

TEST(Scenario, ReportsAreDeterministic) {
  const json c = scalar_scenario(2, 0.5, cplx{0.2, 0.1});
  const auto a = run_scenario(ScenarioKind::evolution, c, {2, 4, 8});
  const auto b = run_scenario(ScenarioKind::evolution, c, {2, 4, 8});
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.report.to_json(false).dump(), b.report.to_json(false).dump());
}

TEST(Scenario, RejectsSweepsBeyondTheSupportedSize) {
  EXPECT_THROW((void)run_scenario(ScenarioKind::evolution, scalar_scenario(2, 1.0, 0.0), {2, 21}),
               DomainError);
}

TEST(Scenario, ShippedConfigsLoad) {
  const auto lebesgue = run_scenario(ScenarioKind::evolution, FOCKFLOW_SCENARIO_DIR "/lebesgue.json", "M=2,4,8");
  EXPECT_TRUE(lebesgue.report.passed());
  EXPECT_EQ(lebesgue.report.suite, "evolve: lebesgue.json");
  const auto brownian = run_scenario(ScenarioKind::evolution, FOCKFLOW_SCENARIO_DIR "/brownian.json", "");
  EXPECT_EQ(csv_rows(brownian.csv).size(), 2u);
  const auto flow = run_scenario(ScenarioKind::flow, FOCKFLOW_SCENARIO_DIR "/qubit_flow.json", "M=1..3");
  EXPECT_TRUE(flow.report.passed());
  EXPECT_EQ(csv_rows(flow.csv)[0][2], "homomorphism_defect");
}

TEST(Scenario, FlowFromCustomBlocksWarnsWhenNotMultiplicative) {
  json c = json::parse(R"({"grid": {"points": 2, "t_max": 1.0}, "system": {"dim": 1},
                           "structure": {"kind": "custom-blocks",
                                         "blocks": {"time": [[[0.0, 0.5]]], "gauge": [[[0.5, 0.0]]]}}})");
  const ScenarioResult r = run_scenario(ScenarioKind::flow, c, {1, 2, 3});
  EXPECT_FALSE(r.report.warnings.empty());
  ASSERT_EQ(r.report.convergence.size(), 1u);
  EXPECT_FALSE(r.report.convergence[0].required);
}

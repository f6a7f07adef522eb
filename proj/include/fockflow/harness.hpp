#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fockflow {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kSlopeThreshold = 0.8;

// One checked identity or inequality. For inequalities the defect is the
// relative excess of the left side over the bound, so it is negative when the
// inequality holds with room to spare.
struct CaseRecord {
  std::string name;
  int criterion = 0;
  std::string digest;
  double defect = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

// A refinement sweep. `slope` is the least-squares log-log order against dx;
// it is absent when the defects are all within the exact tolerance. Records
// with `required == false` are reported but do not decide the suite.
struct ConvergenceRecord {
  std::string name;
  int criterion = 0;
  std::vector<int> sizes;
  std::vector<double> dx;
  std::vector<double> defects;
  std::optional<double> slope;
  double threshold = kSlopeThreshold;
  bool required = true;
  bool passed = false;
  double seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<int> grids;
  double tolerance = kExactTolerance;
  std::vector<CaseRecord> cases;
  std::vector<ConvergenceRecord> convergence;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const;
  // Whether every required record tagged with `criterion` passed; false when
  // there is none.
  [[nodiscard]] bool criterion_passed(int criterion) const;
  [[nodiscard]] std::vector<int> criteria() const;
  // Timings and the generation time are the only nondeterministic fields and
  // are left out when `with_timing` is false.
  [[nodiscard]] nlohmann::json to_json(bool with_timing = true) const;
};

struct SuiteOptions {
  std::vector<int> grids;  // empty: the suite's defaults
  std::uint64_t seed = 1000;
  double tolerance = kExactTolerance;
  int samples = 100;  // instances per randomized identity
  int threads = 0;    // 0: FOCKFLOW_THREADS, else hardware concurrency
};

class UnknownSuiteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for unreadable or malformed scenario documents; line and column are
// 1-based and zero when the error has no source position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0);
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

[[nodiscard]] const std::vector<std::string>& suite_names();
[[nodiscard]] std::vector<int> default_grids(const std::string& suite);
[[nodiscard]] SuiteReport run_suite(const std::string& name, const SuiteOptions& options = {});

// Worker count from an explicit request, FOCKFLOW_THREADS, and the hardware.
[[nodiscard]] int resolve_threads(int requested);
// Runs fn(0) ... fn(count - 1) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Seed of instance `index` in stream `stream` of a suite run.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t index);
// 64-bit FNV-1a of the text, as 16 hex digits.
[[nodiscard]] std::string digest(const std::string& text);

// Fills slope and passed from sizes, dx and defects; dx must shrink.
void fit_convergence(ConvergenceRecord& record, double exact_tolerance);

// "M=2,4,8", "M=1..16" or a mix of both; an empty spec or "M=" yields an
// empty list.
[[nodiscard]] std::vector<int> parse_sweep(const std::string& spec);
// Comma-separated positive integers.
[[nodiscard]] std::vector<int> parse_grid_list(const std::string& text);

// Parses JSON, reporting syntax errors with their line and column.
[[nodiscard]] nlohmann::json parse_config_text(const std::string& text);
[[nodiscard]] nlohmann::json load_config(const std::string& path);

enum class ScenarioKind { evolution, flow };

struct ScenarioResult {
  std::string csv;
  SuiteReport report;
};

// Runs the scenario once per grid size in the sweep, or once at the
// configured size when the sweep is empty.
[[nodiscard]] ScenarioResult run_scenario(ScenarioKind kind, const nlohmann::json& config,
                                          const std::vector<int>& sweep,
                                          const std::string& label = "scenario");
[[nodiscard]] ScenarioResult run_scenario(ScenarioKind kind, const std::string& config_path,
                                          const std::string& sweep_spec);

// 17 significant digits; empty for NaN.
[[nodiscard]] std::string csv_number(double v);

}  // namespace fockflow

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "fockflow/harness.hpp"

namespace {

struct Criterion {
  int number;
  const char* title;
  const char* suite;
};

constexpr Criterion kCriteria[] = {
    {1, "exact kernel *-algebra", "exact-identities"},
    {2, "exact representation identities", "exact-identities"},
    {3, "multiplicativity", "multiplicativity"},
    {4, "Ito formula", "ito"},
    {5, "evolution", "evolution"},
    {6, "canonical decomposition", "evolution"},
    {7, "pseudo-Fock space", "pseudo-fock"},
    {8, "flows", "flows"},
    {9, "norm estimates", "norms"},
    {10, "second quantization", "evolution"},
};

}  // namespace

int main() {
  std::map<std::string, fockflow::SuiteReport> reports;
  for (const std::string& name : fockflow::suite_names()) {
    const auto start = std::chrono::steady_clock::now();
    reports.emplace(name, fockflow::run_suite(name));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("suite %-17s %5.1f s\n", name.c_str(), secs);
  }
  bool all = true;
  for (const Criterion& c : kCriteria) {
    const fockflow::SuiteReport& r = reports.at(c.suite);
    int cases = 0, sweeps = 0;
    for (const auto& k : r.cases) cases += k.criterion == c.number;
    for (const auto& s : r.convergence) sweeps += s.criterion == c.number && s.required;
    const bool ok = r.criterion_passed(c.number);
    all = all && ok;
    std::printf("criterion %d: %s (%s; %d cases, %d sweeps)\n", c.number, ok ? "PASS" : "FAIL",
                c.title, cases, sweeps);
  }
  return all ? 0 : 1;
}

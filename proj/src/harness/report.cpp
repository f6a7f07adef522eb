#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fockflow/convergence.hpp"
#include "fockflow/harness.hpp"
#include "fockflow/types.hpp"

namespace fockflow {

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line),
      column_(column) {}

bool SuiteReport::passed() const {
  for (const auto& c : cases) {
    if (!c.passed) return false;
  }
  for (const auto& r : convergence) {
    if (r.required && !r.passed) return false;
  }
  return true;
}

bool SuiteReport::criterion_passed(int criterion) const {
  bool seen = false;
  for (const auto& c : cases) {
    if (c.criterion != criterion) continue;
    seen = true;
    if (!c.passed) return false;
  }
  for (const auto& r : convergence) {
    if (r.criterion != criterion || !r.required) continue;
    seen = true;
    if (!r.passed) return false;
  }
  return seen;
}

std::vector<int> SuiteReport::criteria() const {
  std::set<int> found;
  for (const auto& c : cases) found.insert(c.criterion);
  for (const auto& r : convergence) found.insert(r.criterion);
  return {found.begin(), found.end()};
}

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json SuiteReport::to_json(bool with_timing) const {
  using nlohmann::json;
  json out;
  out["schema_version"] = kReportSchemaVersion;
  out["suite"] = suite;
  out["seed"] = seed;
  out["grids"] = grids;
  out["tolerance"] = tolerance;
  out["passed"] = passed();
  json by_criterion = json::object();
  for (int c : criteria()) by_criterion[std::to_string(c)] = criterion_passed(c);
  out["criteria"] = by_criterion;
  out["warnings"] = warnings;

  json case_list = json::array();
  for (const auto& c : cases) {
    json j{{"name", c.name},           {"criterion", c.criterion}, {"inputs_digest", c.digest},
           {"defect", c.defect},       {"tolerance", c.tolerance}, {"passed", c.passed}};
    if (with_timing) j["seconds"] = c.seconds;
    case_list.push_back(std::move(j));
  }
  out["cases"] = std::move(case_list);

  json sweeps = json::array();
  for (const auto& r : convergence) {
    json j{{"name", r.name},         {"criterion", r.criterion}, {"sizes", r.sizes},
           {"dx", r.dx},             {"defects", r.defects},     {"threshold", r.threshold},
           {"required", r.required}, {"passed", r.passed}};
    j["slope"] = r.slope ? json(*r.slope) : json(nullptr);
    if (with_timing) j["seconds"] = r.seconds;
    sweeps.push_back(std::move(j));
  }
  out["convergence"] = std::move(sweeps);

  if (with_timing) out["timing"] = {{"total_seconds", seconds}, {"generated_at", utc_now()}};
  return out;
}

int resolve_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("FOCKFLOW_THREADS")) n = std::atoi(env);
  }
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (n <= 0) n = hw;
  return std::max(1, n);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::min(count, std::max(1, threads));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 over the three words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void fit_convergence(ConvergenceRecord& record, double exact_tolerance) {
  record.slope.reset();
  record.passed = false;
  if (record.dx.size() != record.defects.size() || record.dx.size() < 3) return;
  if (std::all_of(record.defects.begin(), record.defects.end(),
                  [&](double d) { return std::abs(d) <= exact_tolerance; })) {
    record.passed = true;
    return;
  }
  if (std::any_of(record.defects.begin(), record.defects.end(),
                  [](double d) { return !(d > 0.0) || !std::isfinite(d); })) {
    return;
  }
  std::vector<double> inverse_dx;
  for (double h : record.dx) inverse_dx.push_back(1.0 / h);
  record.slope = convergence_order(inverse_dx, record.defects);
  record.passed = *record.slope >= record.threshold;
}

namespace {

int parse_positive(const std::string& token, const std::string& context) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty() || v <= 0) {
    throw DomainError(context + ": '" + token + "' is not a positive integer");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

std::vector<int> parse_grid_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_positive(trim(item), "grid list"));
  if (out.empty()) throw DomainError("grid list: empty");
  return out;
}

std::vector<int> parse_sweep(const std::string& spec) {
  std::string body = trim(spec);
  if (body.empty()) return {};
  if (body.rfind("M=", 0) != 0) throw DomainError("sweep: expected M=LIST, got '" + spec + "'");
  body = body.substr(2);
  std::vector<int> out;
  std::stringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_positive(item, "sweep"));
      continue;
    }
    const int lo = parse_positive(item.substr(0, dots), "sweep");
    const int hi = parse_positive(item.substr(dots + 2), "sweep");
    if (hi < lo) throw DomainError("sweep: empty range '" + item + "'");
    for (int m = lo; m <= hi; ++m) out.push_back(m);
  }
  return out;
}

nlohmann::json parse_config_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.find(": ", what.find("parse_error"));
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError("malformed JSON (" + what + ")", line, column);
  }
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fockflow

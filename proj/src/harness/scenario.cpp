#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "fockflow/evolution.hpp"
#include "fockflow/flows.hpp"
#include "fockflow/harness.hpp"
#include "fockflow/serialize.hpp"

namespace fockflow {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kMaxEvolutionPoints = 20;
constexpr int kMaxFlowPoints = 8;

const json* lookup(const json& root, const std::string& path) {
  const json* node = &root;
  std::stringstream in(path);
  std::string key;
  while (std::getline(in, key, '.')) {
    if (!node->is_object()) return nullptr;
    const auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

const json& require(const json& root, const std::string& path) {
  const json* node = lookup(root, path);
  if (!node) throw ConfigError(path + ": missing");
  return *node;
}

int read_dim(const json& root, const std::string& path, int fallback) {
  const json* node = lookup(root, path);
  if (!node) return fallback;
  if (!node->is_number_integer() || node->get<int>() < 1) {
    throw ConfigError(path + ": expected a positive integer");
  }
  return node->get<int>();
}

Matrix read_matrix(const json& node, const std::string& path, Index rows, Index cols) {
  Matrix m;
  try {
    m = matrix_from_json(node);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream s;
    s << path << ": expected a " << rows << " x " << cols << " matrix, got " << m.rows() << " x "
      << m.cols();
    throw ConfigError(s.str());
  }
  return m;
}

Matrix read_optional_matrix(const json& root, const std::string& path, Index rows, Index cols,
                            const Matrix& fallback) {
  const json* node = lookup(root, path);
  return node ? read_matrix(*node, path, rows, cols) : fallback;
}

struct GridSpec {
  int points = 0;
  double t_max = 1.0;
  std::vector<double> weights;  // empty: uniform
  int noise_dim = 1;
  int system_dim = 1;

  [[nodiscard]] Grid make(int m) const {
    if (weights.empty()) return Grid::uniform(m, t_max, noise_dim, system_dim);
    std::vector<double> times;
    double t = 0.0;
    for (double w : weights) {
      times.push_back(t);
      t += w;
    }
    return {times, weights, noise_dim, system_dim};
  }
  [[nodiscard]] double dx(int m) const {
    if (weights.empty()) return t_max / m;
    return *std::max_element(weights.begin(), weights.end());
  }
};

GridSpec read_grid(const json& config, int max_points) {
  GridSpec g;
  const json& points = require(config, "grid.points");
  if (!points.is_number_integer() || points.get<int>() < 1 || points.get<int>() > max_points) {
    throw ConfigError("grid.points: expected an integer in 1.." + std::to_string(max_points));
  }
  g.points = points.get<int>();
  const json* t_max = lookup(config, "grid.t_max");
  if (t_max) {
    if (!t_max->is_number() || !(t_max->get<double>() > 0.0)) {
      throw ConfigError("grid.t_max: expected a positive number");
    }
    g.t_max = t_max->get<double>();
  }
  if (const json* w = lookup(config, "grid.weights")) {
    if (w->is_string()) {
      if (w->get<std::string>() != "uniform") {
        throw ConfigError("grid.weights: expected \"uniform\" or a list of weights");
      }
    } else if (w->is_array()) {
      for (const json& v : *w) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
          throw ConfigError("grid.weights: weights must be positive numbers");
        }
        g.weights.push_back(v.get<double>());
      }
      if (static_cast<int>(g.weights.size()) != g.points) {
        throw ConfigError("grid.weights: expected " + std::to_string(g.points) + " weights");
      }
      const double total = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
      if (t_max && std::abs(total - g.t_max) > 1e-12 * g.t_max) {
        throw ConfigError("grid.weights: weights sum to " + csv_number(total) +
                          ", not grid.t_max");
      }
      g.t_max = total;
    } else {
      throw ConfigError("grid.weights: expected \"uniform\" or a list of weights");
    }
  }
  g.system_dim = read_dim(config, "system.dim", 1);
  g.noise_dim = read_dim(config, "noise.dim", 1);
  return g;
}

enum class GeneratorKind { hamiltonian, scattering, second_quantization };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::hamiltonian;
  TriangularMatrix blocks{1, 1};  // zero corners
  Matrix t0;
  std::vector<std::string> warnings;
  bool unitary = true;

  [[nodiscard]] GeneratorField field(const Grid& grid) const {
    switch (kind) {
      case GeneratorKind::hamiltonian:
        return hamiltonian_to_scattering(HamiltonianField::constant(grid, blocks));
      case GeneratorKind::scattering:
        return GeneratorField::constant(
            grid, blocks + TriangularMatrix::identity(blocks.outer(), blocks.inner()));
      case GeneratorKind::second_quantization: {
        const Index n = grid.system_dim();
        const Matrix one = identity(n);
        const TriangularMatrix f = blocks + TriangularMatrix::identity(1, blocks.inner());
        auto lift = [&](const Matrix& m) -> Matrix { return Eigen::kroneckerProduct(one, m); };
        return GeneratorField::constant(
            grid, TriangularMatrix::from_blocks(one, lift(f.annihilation()), lift(f.time()),
                                                lift(f.gauge()), lift(f.creation()), one));
      }
    }
    throw DomainError("unreachable generator kind");
  }
};

GeneratorSpec read_generator(const json& config, const GridSpec& grid) {
  GeneratorSpec spec;
  std::string kind = "hamiltonian";
  if (const json* k = lookup(config, "generator.kind")) {
    if (!k->is_string()) throw ConfigError("generator.kind: expected a string");
    kind = k->get<std::string>();
  }
  if (kind == "hamiltonian") {
    spec.kind = GeneratorKind::hamiltonian;
  } else if (kind == "scattering") {
    spec.kind = GeneratorKind::scattering;
  } else if (kind == "second_quantization") {
    spec.kind = GeneratorKind::second_quantization;
  } else {
    throw ConfigError("generator.kind: expected hamiltonian, scattering or second_quantization, got '" +
                      kind + "'");
  }
  // Second quantization acts on the noise only.
  const Index n = spec.kind == GeneratorKind::second_quantization ? 1 : grid.system_dim;
  const Index nd = n * grid.noise_dim;
  require(config, "hamiltonian");
  const Matrix gauge = read_optional_matrix(config, "hamiltonian.H00", nd, nd, Matrix::Zero(nd, nd));
  const Matrix creation =
      read_optional_matrix(config, "hamiltonian.H+0", nd, n, Matrix::Zero(nd, n));
  const Matrix annihilation =
      read_optional_matrix(config, "hamiltonian.H0-", n, nd, Matrix::Zero(n, nd));
  const Matrix time = read_optional_matrix(config, "hamiltonian.H+-", n, n, Matrix::Zero(n, n));
  spec.blocks = hamiltonian_matrix(gauge, creation, annihilation, time);
  const Index sn = grid.system_dim;
  spec.t0 = read_optional_matrix(config, "initial.T0", sn, sn, identity(sn));

  if (spec.kind == GeneratorKind::hamiltonian) {
    const double defect = pseudo_hermiticity_defect(spec.blocks);
    if (defect > kExactTolerance) {
      spec.unitary = false;
      spec.warnings.push_back("hamiltonian is not pseudo-Hermitian (defect " + csv_number(defect) +
                              "); the evolution is computed but unitarity is not required");
    }
  } else {
    const TriangularMatrix f = spec.blocks + TriangularMatrix::identity(n, nd);
    const double defect = pseudo_unitarity_defect(f);
    if (defect > kExactTolerance) {
      spec.unitary = false;
      spec.warnings.push_back("generator is not pseudo-unitary (defect " + csv_number(defect) +
                              "); unitarity is not required");
    }
  }
  const double t0_defect = spectral_norm(spec.t0.adjoint() * spec.t0 - identity(sn));
  if (t0_defect > kExactTolerance) {
    spec.unitary = false;
    spec.warnings.push_back("initial.T0 is not unitary; unitarity is not required");
  }
  return spec;
}

struct FlowSpec {
  GeneratorSpec generator;
  bool spatial = true;
  PointStructure custom = PointStructure::trivial(1, 1);
  MatrixMap tau0 = MatrixMap::identity(1);
  std::vector<Matrix> algebra;
};

MatrixMap read_map(const json& config, const std::string& path, Index n, Index rows, Index cols,
                   const MatrixMap& fallback) {
  const json* node = lookup(config, path);
  if (!node) return fallback;
  return {n, n, rows, cols, read_matrix(*node, path, rows * cols, n * n)};
}

FlowSpec read_flow(const json& config, const GridSpec& grid) {
  FlowSpec spec;
  const Index n = grid.system_dim;
  const Index nd = n * grid.noise_dim;
  std::string kind = "spatial";
  if (const json* k = lookup(config, "structure.kind")) {
    if (!k->is_string()) throw ConfigError("structure.kind: expected a string");
    kind = k->get<std::string>();
  }
  if (kind == "spatial") {
    spec.generator = read_generator(config, grid);
    if (spec.generator.kind == GeneratorKind::second_quantization) {
      throw ConfigError("structure.kind: spatial maps need a hamiltonian or scattering generator");
    }
  } else if (kind == "custom-blocks") {
    spec.spatial = false;
    const std::string base = "structure.blocks.";
    spec.custom = PointStructure{
        read_map(config, base + "annihilation", n, n, nd, MatrixMap::zero(n, n, n, nd)),
        read_map(config, base + "time", n, n, n, MatrixMap::zero(n, n, n, n)),
        read_map(config, base + "gauge", n, nd, nd, MatrixMap::ampliation(n, grid.noise_dim)),
        read_map(config, base + "creation", n, nd, n, MatrixMap::zero(n, n, nd, n))};
  } else {
    throw ConfigError("structure.kind: expected spatial or custom-blocks, got '" + kind + "'");
  }
  spec.tau0 = read_map(config, "tau0", n, n, n, MatrixMap::identity(n));
  if (const json* gens = lookup(config, "generators")) {
    if (!gens->is_array() || gens->empty()) {
      throw ConfigError("generators: expected a non-empty list of matrices");
    }
    for (std::size_t k = 0; k < gens->size(); ++k) {
      spec.algebra.push_back(read_matrix((*gens)[k], "generators[" + std::to_string(k) + "]", n, n));
    }
  } else {
    spec.algebra = matrix_units(n);
  }
  return spec;
}

std::string local_slope(double prev_dx, double prev, double dx, double cur) {
  if (!(prev > 0.0) || !(cur > 0.0) || prev_dx == dx) return "";
  return csv_number(std::log(prev / cur) / std::log(prev_dx / dx));
}

CaseRecord scenario_case(const std::string& inputs, const std::string& what, int m, double defect,
                         double tolerance, Clock::time_point start) {
  CaseRecord c;
  c.name = what + " (M=" + std::to_string(m) + ")";
  c.digest = digest(inputs + "|" + what + "|" + std::to_string(m));
  c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  c.defect = defect;
  c.tolerance = tolerance;
  c.passed = std::isfinite(defect) && defect <= tolerance;
  return c;
}

void close_sweep(SuiteReport& report, ConvergenceRecord record, bool required) {
  if (record.sizes.size() < 3) return;
  record.required = required;
  fit_convergence(record, kExactTolerance);
  report.convergence.push_back(std::move(record));
}

ScenarioResult evolution_scenario(const json& config, const std::vector<int>& sizes,
                                  const GridSpec& grid, const std::string& label) {
  const GeneratorSpec gen = read_generator(config, grid);
  ScenarioResult result;
  result.report.suite = "evolve: " + label;
  result.report.grids = sizes;
  result.report.warnings = gen.warnings;
  std::ostringstream csv;
  csv << "M,dx,unitarity_defect,vacuum_amplitude_re,vacuum_amplitude_im,slope_estimate\n";
  ConvergenceRecord sweep;
  sweep.name = "unitarity-defect";
  double prev_dx = 0.0, prev = 0.0;
  for (int m : sizes) {
    const auto start = Clock::now();
    const Grid g = grid.make(m);
    const GeneratorField f = gen.field(g);
    const GateProduct u = evolution_gates(grid.t_max, f, gen.t0);
    const double defect = unitarity_defect(u, 1.0, 0.25);
    const cplx amplitude = u.apply(Vector::Unit(u.space().dim(), 0))(0);
    const double dx = grid.dx(m);
    csv << m << ',' << csv_number(dx) << ',' << csv_number(defect) << ','
        << csv_number(amplitude.real()) << ',' << csv_number(amplitude.imag()) << ','
        << (sweep.sizes.empty() ? "" : local_slope(prev_dx, prev, dx, defect)) << '\n';
    sweep.sizes.push_back(m);
    sweep.dx.push_back(dx);
    sweep.defects.push_back(defect);
    prev_dx = dx;
    prev = defect;
    if (gen.unitary) {
      result.report.cases.push_back(scenario_case(config.dump(), "generator-pseudo-unitary", m,
                                                  pseudo_unitarity_check(f), kExactTolerance,
                                                  start));
    }
  }
  close_sweep(result.report, std::move(sweep), gen.unitary);
  result.csv = csv.str();
  return result;
}

ScenarioResult flow_scenario(const json& config, const std::vector<int>& sizes,
                             const GridSpec& grid, const std::string& label) {
  const FlowSpec spec = read_flow(config, grid);
  ScenarioResult result;
  result.report.suite = "flow: " + label;
  result.report.grids = sizes;
  result.report.warnings = spec.generator.warnings;
  const Index n = grid.system_dim;
  std::ostringstream csv;
  csv << "M,dx,homomorphism_defect,hermiticity_defect,unit_defect,slope_estimate\n";
  ConvergenceRecord sweep;
  sweep.name = "homomorphism-defect";
  bool hermitian = true, multiplicative = true;
  double prev_dx = 0.0, prev = 0.0;
  for (int m : sizes) {
    const auto start = Clock::now();
    const Grid g = grid.make(m);
    const StructureMap phi = spec.spatial ? spatial_structure_map(spec.generator.field(g))
                                          : StructureMap(g, std::vector(m, spec.custom));
    if (sweep.sizes.empty()) {
      hermitian = hermiticity_defect(phi) <= kExactTolerance;
      multiplicative = multiplicativity_defect(phi, spec.algebra) <= 1e-10;
      if (!hermitian) {
        result.report.warnings.push_back("structure map is not Hermitian; flow identities are not required");
      }
      if (!multiplicative) {
        result.report.warnings.push_back(
            "structure map is not multiplicative on the generators; convergence is not required");
      }
    }
    const double t = grid.t_max;
    double homomorphism = 0.0, hermiticity = 0.0;
    for (const Matrix& a : spec.algebra) {
      homomorphism = std::max(homomorphism, homomorphism_defect(t, phi, spec.tau0, a, 1.0, 0.25));
      hermiticity = std::max(hermiticity, fock_norm(flow(t, phi, spec.tau0, a.adjoint()) -
                                                    fock_adjoint(flow(t, phi, spec.tau0, a))));
    }
    const FockOperator unit = flow(t, phi, spec.tau0, identity(n));
    const double unit_defect = fock_norm(unit - FockOperator::identity(unit.space_ptr()));
    const double dx = grid.dx(m);
    csv << m << ',' << csv_number(dx) << ',' << csv_number(homomorphism) << ','
        << csv_number(hermiticity) << ',' << csv_number(unit_defect) << ','
        << (sweep.sizes.empty() ? "" : local_slope(prev_dx, prev, dx, homomorphism)) << '\n';
    sweep.sizes.push_back(m);
    sweep.dx.push_back(dx);
    sweep.defects.push_back(homomorphism);
    prev_dx = dx;
    prev = homomorphism;
    if (hermitian) {
      result.report.cases.push_back(
          scenario_case(config.dump(), "flow-hermitian", m, hermiticity, kExactTolerance, start));
    }
    if (hermitian && multiplicative) {
      result.report.cases.push_back(
          scenario_case(config.dump(), "flow-unital", m, unit_defect, kExactTolerance, start));
    }
  }
  close_sweep(result.report, std::move(sweep), hermitian && multiplicative);
  result.csv = csv.str();
  return result;
}

}  // namespace

ScenarioResult run_scenario(ScenarioKind kind, const json& config, const std::vector<int>& sweep,
                            const std::string& label) {
  if (!config.is_object()) throw ConfigError("scenario config must be a JSON object");
  const int cap = kind == ScenarioKind::flow ? kMaxFlowPoints : kMaxEvolutionPoints;
  const GridSpec grid = read_grid(config, cap);
  std::vector<int> sizes = sweep.empty() ? std::vector<int>{grid.points} : sweep;
  if (!sweep.empty() && !grid.weights.empty()) {
    throw ConfigError("grid.weights: a weight list fixes M; sweeps need uniform weights");
  }
  for (int m : sizes) {
    if (m < 1 || m > cap) {
      throw DomainError("sweep: M=" + std::to_string(m) + " outside 1.." + std::to_string(cap));
    }
  }
  const auto start = Clock::now();
  ScenarioResult result = kind == ScenarioKind::flow ? flow_scenario(config, sizes, grid, label)
                                                     : evolution_scenario(config, sizes, grid, label);
  result.report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

ScenarioResult run_scenario(ScenarioKind kind, const std::string& config_path,
                            const std::string& sweep_spec) {
  return run_scenario(kind, load_config(config_path), parse_sweep(sweep_spec),
                      std::filesystem::path(config_path).filename().string());
}

}  // namespace fockflow

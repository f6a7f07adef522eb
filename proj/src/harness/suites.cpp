#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "fockflow/convergence.hpp"
#include "fockflow/evolution.hpp"
#include "fockflow/flows.hpp"
#include "fockflow/gates.hpp"
#include "fockflow/harness.hpp"
#include "fockflow/integrals.hpp"
#include "fockflow/ito.hpp"
#include "fockflow/pseudo_fock.hpp"
#include "fockflow/sampling.hpp"

namespace fockflow {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int kMultiplicativityInstances = 20;
constexpr double kBoundSlack = 1e-9;
constexpr double kDecompositionTolerance = 1e-10;
constexpr double kDualityTolerance = 1e-10;

struct Context {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<int> grids;
  double tol = kExactTolerance;
  int samples = 100;

  [[nodiscard]] int grid(int i) const { return grids[static_cast<std::size_t>(i) % grids.size()]; }
};

struct Outcome {
  std::vector<CaseRecord> cases;
  std::vector<ConvergenceRecord> sweeps;
};

using Task = std::function<Outcome()>;

struct Plan {
  std::vector<Task> tasks;
  std::function<void(SuiteReport&)> finish;
};

std::string shape(const Grid& g) {
  std::ostringstream s;
  s << "M=" << g.size() << " n=" << g.system_dim() << " d=" << g.noise_dim();
  return s.str();
}

// Seeded state and record constructors for one randomized instance.
struct Instance {
  Instance(const Context& c, std::uint64_t stream, int i)
      : ctx(c), index(i), seed(derive_seed(c.seed, stream, static_cast<std::uint64_t>(i))),
        rng(seed) {}

  [[nodiscard]] CaseRecord record(const std::string& what, int criterion, const std::string& dims,
                                  double defect, double tolerance) const {
    CaseRecord r;
    r.name = what + " #" + std::to_string(index) + " (" + dims + ")";
    r.criterion = criterion;
    r.digest = digest(ctx.suite + "|" + what + "|" + std::to_string(seed) + "|" + dims);
    r.defect = defect;
    r.tolerance = tolerance;
    r.passed = std::isfinite(defect) && defect <= tolerance;
    return r;
  }
  [[nodiscard]] CaseRecord exact(const std::string& what, int criterion, const std::string& dims,
                                 double defect) const {
    return record(what, criterion, dims, defect, ctx.tol);
  }
  // Relative excess of value over bound.
  [[nodiscard]] CaseRecord bound(const std::string& what, int criterion, const std::string& dims,
                                 double value, double limit, double slack) const {
    return record(what, criterion, dims, (value - limit) / std::max(limit, 1e-300), slack);
  }

  const Context& ctx;
  int index;
  std::uint64_t seed;
  Rng rng;
};

// Increasing times from zero with weights in [0.2, 0.6].
Grid random_grid(int m, int d, int n, Rng& rng) {
  std::vector<double> times, weights;
  double t = 0.0;
  for (int k = 0; k < m; ++k) {
    const double w = rng.uniform(0.2, 0.6);
    times.push_back(t);
    weights.push_back(w);
    t += w;
  }
  return {times, weights, d, n};
}

double grid_end(const Grid& g) { return g.times().back() + g.weights().back(); }

// Query times strictly between grid times plus one past the end.
std::vector<double> query_times(const Grid& g) {
  std::vector<double> ts;
  for (int k = 0; k < g.size(); ++k) ts.push_back(g.time(k) + 0.5 * g.weight(k));
  ts.push_back(grid_end(g));
  return ts;
}

OperatorKernel random_operator_kernel(const SpacePtr& s, Rng& rng, double density) {
  OperatorKernel b(s);
  for (std::size_t code = 0; code < table_count(s->grid().size()); ++code) {
    if (rng.uniform(0.0, 1.0) >= density) continue;
    b.set(table_from_code(code, s->grid().size()), rng.matrix(s->dim(), s->dim()));
  }
  return b;
}

BiKernel random_bikernel(const Grid& g, Rng& rng, double density) {
  BiKernel l(g);
  const Kernel layout(g);
  for (std::size_t a = 0; a < table_count(g.size()); ++a) {
    for (std::size_t b = 0; b < table_count(g.size()); ++b) {
      const KernelTable theta = table_from_code(a, g.size());
      const KernelTable kappa = table_from_code(b, g.size());
      if (!disjoint(theta, kappa) || rng.uniform(0.0, 1.0) >= density) continue;
      const KernelTable u = theta | kappa;
      l.set(theta, kappa, rng.matrix(layout.rows(u), layout.cols(u)));
    }
  }
  return l;
}

IntegrandTable random_integrand(const SpacePtr& s, Rng& rng) {
  IntegrandTable d = IntegrandTable::zero(s);
  for (Slot slot : kSlots) {
    for (auto& m : d.slot(slot)) m = rng.matrix(s->dim(), s->dim());
  }
  return d;
}

TriangularMatrix random_triangular(Rng& rng, Index outer, Index inner) {
  return TriangularMatrix::from_blocks(rng.matrix(outer, outer), rng.matrix(outer, inner),
                                       rng.matrix(outer, outer), rng.matrix(inner, inner),
                                       rng.matrix(inner, outer), rng.matrix(outer, outer));
}

// Pseudo-Hermitian H whose gauge block has eigenvalues of modulus in [0.2, 1].
TriangularMatrix random_invertible_hamiltonian(Index n, int d, Rng& rng) {
  TriangularMatrix h = random_pseudo_hermitian(n, d, rng);
  const Index m = n * d;
  Eigen::VectorXd spectrum(m);
  for (Index i = 0; i < m; ++i) {
    spectrum(i) = (rng.integer(0, 1) == 0 ? -1.0 : 1.0) * rng.uniform(0.2, 1.0);
  }
  const Matrix u = rng.unitary(m);
  h.set_gauge(u * spectrum.cast<cplx>().asDiagonal() * u.adjoint());
  return h;
}

GeneratorField random_unitary_field(const Grid& g, Rng& rng, double scale) {
  std::vector<TriangularMatrix> h;
  for (int x = 0; x < g.size(); ++x) {
    h.push_back(random_pseudo_hermitian(g.system_dim(), g.noise_dim(), rng, scale));
  }
  return hamiltonian_to_scattering(HamiltonianField(g, std::move(h)));
}

ConvergenceRecord sweep_record(const std::string& name, int criterion,
                               const std::vector<int>& sizes, double t_max) {
  ConvergenceRecord r;
  r.name = name;
  r.criterion = criterion;
  r.sizes = sizes;
  for (int m : sizes) r.dx.push_back(t_max / m);
  return r;
}

// Criteria 1 and 2.
Plan exact_identities(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < 2 * ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 1, i);
      const int n = in.rng.integer(1, 2), d = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), d, n, in.rng);
      const Kernel r = random_kernel(g, in.rng), s = random_kernel(g, in.rng),
                   t = random_kernel(g, in.rng);
      const Kernel e = unit_kernel(g);
      const std::string dims = shape(g);
      Outcome out;
      out.cases.push_back(in.exact("associativity", 1, dims,
                                   max_difference(kernel_product(kernel_product(r, s), t),
                                                  kernel_product(r, kernel_product(s, t)))));
      out.cases.push_back(in.exact("unit-laws", 1, dims,
                                   std::max(max_difference(kernel_product(e, s), s),
                                            max_difference(kernel_product(s, e), s))));
      out.cases.push_back(
          in.exact("adjoint-reverses-products", 1, dims,
                   max_difference(kernel_adjoint(kernel_product(s, t)),
                                  kernel_product(kernel_adjoint(t), kernel_adjoint(s)))));
      out.cases.push_back(
          in.exact("integrand-round-trip", 1, dims,
                   std::max(max_difference(integrand_from_kernel(kernel_from_integrand(r)), r),
                            max_difference(kernel_from_integrand(integrand_from_kernel(r)), r))));
      return out;
    });
  }
  for (int i = 0; i < ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 2, i);
      const int n = in.rng.integer(1, 2), d = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), d, n, in.rng);
      return Outcome{{in.exact("iota-adjoint", 2, shape(g),
                               iota_adjoint_check(random_kernel(g, in.rng)))},
                     {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 3, i);
      const Grid g = random_grid(ctx.grid(i), 1, in.rng.integer(1, 2), in.rng);
      const SpacePtr s = make_space(g);
      const OperatorKernel b = random_operator_kernel(s, in.rng, 1.0);
      const IntegrandTable d = qs_derivatives(b);
      double worst = 0.0;
      for (double t : query_times(g)) {
        const Matrix diff = multiple_integral(t, b).matrix() - b.at(KernelTable{}) -
                            single_integrals(t, d).matrix();
        worst = std::max(worst, spectral_norm(diff));
      }
      return Outcome{{in.exact("increment-reconstruction", 2, shape(g), worst)}, {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 4, i);
      const Grid g = random_grid(ctx.grid(i), 1, in.rng.integer(1, 2), in.rng);
      const BiKernel l = random_bikernel(g, in.rng, 0.6);
      const BiKernel p = pointwise_bikernel(random_kernel(g, in.rng));
      double worst = 0.0;
      std::vector<double> ts = query_times(g);
      ts.push_back(0.0);
      for (double t : ts) {
        worst = std::max({worst, check_intertwining(t, l), check_intertwining(t, p)});
      }
      return Outcome{{in.exact("intertwining", 2, shape(g), worst)}, {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 5, i);
      const int n = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), 1, n, in.rng);
      const SpacePtr s = make_space(g);
      const IntegrandTable b = random_integrand(s, in.rng);
      // Steps at zero and at a random subset of the later grid times; each
      // value lives on the system and the points strictly before its step.
      StepProcess u;
      for (int k = 0; k < g.size(); ++k) {
        if (k > 0 && in.rng.integer(0, 1) == 0) continue;
        const double tau = g.time(k);
        std::vector<PointFactor> f;
        for (int x = 0; x < g.size(); ++x) {
          f.push_back(g.time(x) < tau ? random_point_factor(1, in.rng) : PointFactor::unit(1));
        }
        u.times.push_back(tau);
        u.values.push_back(iota(product_kernel(in.rng.matrix(n, n), f, g), s));
      }
      double worst = 0.0;
      for (double t : query_times(g)) worst = std::max(worst, ito_sum_compare(t, b, u));
      return Outcome{{in.exact("ito-sum-equivalence", 2, shape(g), worst)}, {}};
    });
  }
  return plan;
}

// Criterion 3.
Plan multiplicativity(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < std::max(1, ctx.samples / 5); ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 6, i);
      const Grid g({0.0}, {0.5});
      const cplx s = in.rng.complex_normal(), t = in.rng.complex_normal();
      const Kernel ann = product_kernel(PointFactor::scalar(Slot::annihilation, s), g);
      const Kernel cre = product_kernel(PointFactor::scalar(Slot::creation, t), g);
      const Matrix product = iota(kernel_product(ann, cre)).matrix();
      Matrix closed(2, 2);
      closed << 1.0 + 0.5 * s * t, 0.5 * s, t, 1.0;
      Outcome out;
      out.cases.push_back(in.exact("fixture-multiplicative", 3, shape(g),
                                   spectral_norm(product - iota(ann).matrix() * iota(cre).matrix())));
      out.cases.push_back(
          in.exact("fixture-closed-form", 3, shape(g), spectral_norm(product - closed)));
      return out;
    });
  }
  for (std::size_t k = 0; k < ctx.grids.size(); ++k) {
    plan.tasks.emplace_back([ctx, k] {
      Instance in(ctx, 7, static_cast<int>(k));
      const Grid g = Grid::uniform(ctx.grids[k], 1.0);
      std::vector<PointFactor> ann, cre;
      for (int x = 0; x < g.size(); ++x) {
        ann.push_back(PointFactor::scalar(Slot::annihilation, 0.5 * in.rng.complex_normal()));
        cre.push_back(PointFactor::scalar(Slot::creation, 0.5 * in.rng.complex_normal()));
      }
      return Outcome{{in.exact("annihilation-before-creation", 3, shape(g),
                               product_multiplicativity_defect(identity(1), ann, identity(1), cre,
                                                               g, 1.0, 1.0))},
                     {}};
    });
  }
  for (int i = 0; i < kMultiplicativityInstances; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      const std::uint64_t seed = derive_seed(ctx.seed, 8, static_cast<std::uint64_t>(i));
      ConvergenceRecord r = sweep_record("product-kernel #" + std::to_string(i), 3, ctx.grids, 1.0);
      r.required = false;
      for (int m : ctx.grids) {
        // Same continuum data on every grid.
        Rng draw(seed);
        const Grid g = Grid::uniform(m, 1.0, 1, 2);
        const Matrix x = draw.matrix(2, 2), y = draw.matrix(2, 2);
        const auto f = smooth_point_factors(g, draw, 0.3);
        const auto h = smooth_point_factors(g, draw, 0.3);
        r.defects.push_back(product_multiplicativity_defect(x, f, y, h, g, 1.0, 0.25));
      }
      fit_convergence(r, ctx.tol);
      return Outcome{{}, {r}};
    });
  }
  plan.finish = [ctx](SuiteReport& report) {
    std::vector<double> slopes;
    std::vector<std::vector<double>> per_size(ctx.grids.size());
    for (const auto& r : report.convergence) {
      if (r.required || r.criterion != 3) continue;
      slopes.push_back(r.slope.value_or(std::nan("")));
      for (std::size_t k = 0; k < r.defects.size(); ++k) per_size[k].push_back(r.defects[k]);
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    ConvergenceRecord summary = sweep_record(
        "product-kernel median over " + std::to_string(slopes.size()) + " instances", 3,
        ctx.grids, 1.0);
    for (auto& d : per_size) summary.defects.push_back(median(d));
    if (std::none_of(slopes.begin(), slopes.end(), [](double v) { return std::isnan(v); })) {
      summary.slope = median(slopes);
      summary.passed = *summary.slope >= summary.threshold;
    }
    report.convergence.push_back(summary);
  };
  return plan;
}

// Criterion 4.
Plan ito(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 9, i);
      const Grid g = random_grid(1 + i % 3, 1, in.rng.integer(1, 2), in.rng);
      const KernelProcess p = integrand_process(random_kernel(g, in.rng, 0.5));
      double worst = 0.0;
      for (double t : query_times(g)) worst = std::max(worst, kernel_ito_defect(p(t)));
      Outcome out;
      out.cases.push_back(in.exact("kernel-ito-integrand-process", 4, shape(g), worst));
      out.cases.push_back(in.exact("kernel-ito-arbitrary-kernel", 4, shape(g),
                                   kernel_ito_defect(random_kernel(g, in.rng))));
      return out;
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 10, i);
      const Index n = in.rng.integer(1, 3);
      const int d = in.rng.integer(1, 2);
      const auto u = random_triangular(in.rng, n, n * d);
      const auto g = random_triangular(in.rng, n, n * d);
      const auto inc = g - u;
      const auto expanded =
          pseudo_conjugate(u) * inc + pseudo_conjugate(inc) * u + pseudo_conjugate(inc) * inc;
      const std::string dims = "n=" + std::to_string(n) + " d=" + std::to_string(d);
      return Outcome{{in.exact("triangular-ito-identity", 4, dims,
                               max_difference(ito_product_derivative(u, g), expanded))},
                     {}};
    });
  }
  plan.tasks.emplace_back([ctx] {
    PointFactor f = PointFactor::unit(1);
    f.annihilation(0, 0) = 0.2;
    f.time = cplx{0.0, 0.2};
    f.gauge(0, 0) = 0.9;
    f.creation(0, 0) = 0.2;
    ConvergenceRecord r = sweep_record("operator-ito-product-process", 4, ctx.grids, 1.0);
    for (int m : ctx.grids) {
      const Grid g = Grid::uniform(m, 1.0);
      const KernelProcess p =
          product_process(Matrix::Identity(1, 1), std::vector<PointFactor>(m, f), g);
      r.defects.push_back(operator_ito_defect(p, g, 1.0, 1.0, 0.25));
    }
    fit_convergence(r, ctx.tol);
    return Outcome{{}, {r}};
  });
  return plan;
}

// Criteria 5, 6 and 10.
Plan evolution(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 11, i);
      const Index n = in.rng.integer(1, 3);
      const int d = in.rng.integer(1, 2);
      const double scale = in.rng.uniform(0.1, 3.0);
      const TriangularMatrix h = random_pseudo_hermitian(n, d, in.rng, scale);
      const std::string dims = "n=" + std::to_string(n) + " d=" + std::to_string(d);
      return Outcome{{in.exact("scattering-pseudo-unitary", 5, dims,
                               pseudo_unitarity_defect(scattering_matrix(h)))},
                     {}};
    });
  }
  for (int i = 0; i < std::max(1, ctx.samples / 5); ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 12, i);
      const int n = in.rng.integer(1, 2), d = in.rng.integer(1, 2);
      const Grid g = random_grid(3, d, n, in.rng);
      const Kernel k =
          chronological_kernel(grid_end(g), random_unitary_field(g, in.rng, 1.0), in.rng.unitary(n));
      return Outcome{{in.exact("kernel-isometry", 5, shape(g),
                               max_difference(kernel_product(kernel_adjoint(k), k), unit_kernel(g)))},
                     {}};
    });
  }
  for (int i = 0; i < 3; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 13, i);
      const TriangularMatrix h = random_pseudo_hermitian(2, 1, in.rng);
      ConvergenceRecord r =
          sweep_record("unitarity-defect #" + std::to_string(i), 5, ctx.grids, 1.0);
      for (int m : ctx.grids) {
        const Grid g = Grid::uniform(m, 1.0, 1, 2);
        const GeneratorField f = hamiltonian_to_scattering(HamiltonianField::constant(g, h));
        r.defects.push_back(unitarity_defect(evolution_gates(1.0, f, identity(2)), 1.0, 0.25));
      }
      fit_convergence(r, ctx.tol);
      return Outcome{{}, {r}};
    });
  }
  for (std::size_t k = 0; k < ctx.grids.size(); ++k) {
    plan.tasks.emplace_back([ctx, k] {
      Instance in(ctx, 14, static_cast<int>(k));
      const int m = ctx.grids[k];
      const Grid g = Grid::uniform(m, 1.0);
      const HamiltonianField h =
          HamiltonianField::constant(g, lebesgue_hamiltonian(Matrix::Constant(1, 1, 1.0), 1));
      const GateProduct u = evolution_gates(1.0, hamiltonian_to_scattering(h), identity(1));
      const cplx amplitude = u.apply(Vector::Unit(u.space().dim(), 0))(0);
      const double w = 1.0 / m;
      Outcome out;
      out.cases.push_back(in.exact("lebesgue-vacuum-product", 5, shape(g),
                                   std::abs(amplitude - std::pow(cplx{1.0, -w}, m))));
      out.cases.push_back(in.bound("lebesgue-vacuum-limit", 5, shape(g),
                                   std::abs(amplitude - std::exp(cplx{0.0, -1.0})), 2.0 * w,
                                   kBoundSlack));
      return out;
    });
  }
  for (int i = 0; i < std::max(1, ctx.samples / 2); ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 15, i);
      const Index n = in.rng.integer(1, 2);
      const int d = in.rng.integer(1, 2);
      const auto dec = canonical_decomposition(random_invertible_hamiltonian(n, d, in.rng));
      const auto one = TriangularMatrix::identity(n, n * d);
      double worst = 0.0;
      for (const TriangularMatrix* part : {&dec.poissonian, &dec.brownian, &dec.lebesgue}) {
        worst = std::max(worst, pseudo_unitarity_defect(one + *part));
      }
      const std::string dims = "n=" + std::to_string(n) + " d=" + std::to_string(d);
      Outcome out;
      out.cases.push_back(in.exact(
          "decomposition-sum", 6, dims,
          max_difference(dec.poissonian + dec.brownian + dec.lebesgue, dec.generator)));
      out.cases.push_back(
          in.record("decomposition-parts-pseudo-unitary", 6, dims, worst, kDecompositionTolerance));
      return out;
    });
  }
  for (int i = 0; i < 24; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 16, i);
      const int m = 1 + i % 4;
      const Index n = 1 + (i / 4) % 2;
      const Grid g = random_grid(m, 1, static_cast<int>(n), in.rng);
      std::vector<TriangularMatrix> l, f;
      const Matrix one = identity(n);
      for (int x = 0; x < m; ++x) {
        const TriangularMatrix lx = random_pseudo_hermitian(1, 1, in.rng) * cplx{0.5, 0.0};
        const TriangularMatrix fx = lx + TriangularMatrix::identity(1, 1);
        l.push_back(lx);
        f.push_back(TriangularMatrix::from_blocks(
            one, Eigen::kroneckerProduct(one, fx.annihilation()).eval(),
            Eigen::kroneckerProduct(one, fx.time()).eval(),
            Eigen::kroneckerProduct(one, fx.gauge()).eval(),
            Eigen::kroneckerProduct(one, fx.creation()).eval(), one));
      }
      double worst = 0.0;
      for (double t : query_times(g)) {
        const Matrix diff = second_quantization(t, l, g).matrix() -
                            solve_evolution(t, GeneratorField(g, f), one).matrix();
        worst = std::max(worst, spectral_norm(diff));
      }
      return Outcome{{in.exact("second-quantization", 10, shape(g), worst)}, {}};
    });
  }
  return plan;
}

FockVector random_fock(const SpacePtr& s, Rng& rng) {
  return FockVector(s, rng.gaussian(s->dim(), 1).col(0));
}

// Columns of J* T J.
Matrix represented(const Kernel& t, const SpacePtr& s) {
  Matrix m(s->dim(), s->dim());
  for (Index j = 0; j < s->dim(); ++j) {
    FockVector e(s);
    e.coeffs()(j) = 1.0;
    m.col(j) = project_Jstar(decomposable_action(t, embed_J(e)), s).coeffs();
  }
  return m;
}

double relative_gap(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Criterion 7.
Plan pseudo_fock(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 17, i);
      const int n = in.rng.integer(1, 2), d = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), d, n, in.rng);
      const SpacePtr s = make_space(g);
      const FockVector a = random_fock(s, in.rng), b = random_fock(s, in.rng);
      const Kernel t = random_kernel(g, in.rng, 0.7);
      const auto pa = random_pseudo_fock(g, in.rng), pb = random_pseudo_fock(g, in.rng);
      const Matrix expected = iota(t, s).matrix();
      const std::string dims = shape(g);
      Outcome out;
      out.cases.push_back(in.exact("J-pseudo-isometry", 7, dims,
                                   relative_gap(pseudo_inner(embed_J(a), embed_J(b)), fock_inner(a, b))));
      out.cases.push_back(in.exact(
          "J-sandwich-reproduces-iota", 7, dims,
          spectral_norm(represented(t, s) - expected) / std::max(1.0, spectral_norm(expected))));
      out.cases.push_back(in.exact(
          "decomposable-pseudo-adjoint", 7, dims,
          relative_gap(pseudo_inner(decomposable_action(t, pa), pb),
                       pseudo_inner(pa, decomposable_action(kernel_adjoint(t), pb)))));
      return out;
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 18, i);
      const int n = in.rng.integer(1, 2), d = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), d, n, in.rng);
      const FockVector a = random_fock(make_space(g), in.rng);
      const TruncationBound b = truncated_J_bound(a, in.rng.uniform(0.0, 1.2 * grid_end(g)));
      return Outcome{{in.bound("truncated-J-bound", 7, shape(g), b.norm_squared, b.bound, ctx.tol)},
                     {}};
    });
  }
  return plan;
}

// Criterion 8.
Plan flows(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < std::max(1, ctx.samples / 5); ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 21, i);
      const int d = in.rng.integer(1, 2);
      const Grid g = random_grid(2 + i % 3, d, 2, in.rng);
      const StructureMap phi = spatial_structure_map(random_unitary_field(g, in.rng, 1.0));
      const MatrixMap tau0 = MatrixMap::identity(2);
      const double t = grid_end(g);
      const FockOperator unit = flow(t, phi, tau0, identity(2));
      const Matrix a = in.rng.matrix(2, 2);
      const FockOperator ja = flow(t, phi, tau0, a);
      Outcome out;
      out.cases.push_back(in.exact("flow-unital", 8, shape(g),
                                   fock_norm(unit - FockOperator::identity(unit.space_ptr()))));
      out.cases.push_back(in.exact("flow-hermitian", 8, shape(g),
                                   fock_norm(flow(t, phi, tau0, a.adjoint()) - fock_adjoint(ja))));
      return out;
    });
  }
  for (int i = 0; i < 3; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 22, i);
      const TriangularMatrix h = random_pseudo_hermitian(2, 1, in.rng);
      const Matrix a = in.rng.matrix(2, 2);
      ConvergenceRecord r =
          sweep_record("homomorphism-defect #" + std::to_string(i), 8, ctx.grids, 1.0);
      for (int m : ctx.grids) {
        const Grid g = Grid::uniform(m, 1.0, 1, 2);
        const StructureMap phi =
            spatial_structure_map(hamiltonian_to_scattering(HamiltonianField::constant(g, h)));
        r.defects.push_back(homomorphism_defect(1.0, phi, MatrixMap::identity(2), a, 1.0, 0.25));
      }
      fit_convergence(r, ctx.tol);
      return Outcome{{}, {r}};
    });
  }
  return plan;
}

// Criterion 9.
Plan norms(const Context& ctx) {
  Plan plan;
  for (int i = 0; i < ctx.samples; ++i) {
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 24, i);
      const Grid g = random_grid(ctx.grid(i), 1, in.rng.integer(1, 2), in.rng);
      const OperatorKernel b = random_operator_kernel(make_space(g), in.rng, 0.7);
      const EtaTriple up{in.rng.uniform(0.2, 2.0), in.rng.uniform(0.2, 2.0),
                         in.rng.uniform(0.2, 2.0)};
      const EtaTriple lo{in.rng.uniform(0.2, 2.0), in.rng.uniform(0.2, 2.0),
                         in.rng.uniform(0.2, 2.0)};
      const double xp = up.minus + up.zero + up.plus;
      const double xm = 1.0 / (1.0 / lo.minus + 1.0 / lo.zero + 1.0 / lo.plus);
      const double t = grid_end(g);
      return Outcome{{in.bound("multiple-integral-bound", 9, shape(g),
                               operator_scale_norm(multiple_integral(t, b), xp, xm),
                               multi_norm(b, t, up, lo), kBoundSlack)},
                     {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 25, i);
      const Grid g = random_grid(ctx.grid(i), in.rng.integer(1, 2), in.rng.integer(1, 2), in.rng);
      const Kernel t = random_kernel(g, in.rng, 0.5);
      WeightMatrix zeta;
      double gauge_sup = 0.0;
      for (int x = 0; x < g.size(); ++x) {
        zeta.push_back({in.rng.uniform(0.1, 2.0), in.rng.uniform(0.1, 2.0),
                        in.rng.uniform(0.1, 1.5), in.rng.uniform(0.1, 2.0)});
        gauge_sup = std::max(gauge_sup, zeta.back().gauge);
      }
      const double xm = in.rng.uniform(0.2, 1.0);
      const double xp = xm * gauge_sup * gauge_sup * in.rng.uniform(1.1, 3.0);
      const double eps = epsilon_bound(xp, xm, gauge_sup) * in.rng.uniform(0.1, 1.0);
      return Outcome{{in.bound("iota-exponential-bound", 9, shape(g),
                               operator_scale_norm(iota(t), xp, xm), iota_norm_bound(t, zeta, eps),
                               kBoundSlack)},
                     {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 26, i);
      const Grid g = random_grid(ctx.grid(i), 1, in.rng.integer(1, 2), in.rng);
      const GeneratorField f = random_unitary_field(g, in.rng, in.rng.uniform(0.1, 2.0));
      const double xi_plus = in.rng.uniform(1.0, 4.0);
      const double xi_minus = in.rng.uniform(0.1, 1.0);
      const double eps = epsilon_bound(xi_plus, xi_minus, 1.0) * in.rng.uniform(0.1, 1.0);
      const Matrix t0 = in.rng.matrix(g.system_dim(), g.system_dim());
      const NormBound b = evolution_norm_bound_check(f, grid_end(g), t0, xi_plus, xi_minus, eps);
      return Outcome{{in.bound("evolution-norm-bound", 9, shape(g), b.norm, b.bound, kBoundSlack)},
                     {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 27, i);
      const int n = in.rng.integer(1, 2);
      const Grid g = random_grid(ctx.grid(i), 1, n, in.rng);
      const StructureMap phi =
          spatial_structure_map(random_unitary_field(g, in.rng, in.rng.uniform(0.1, 1.5)));
      double gauge_sup = 0.0;
      for (int x = 0; x < g.size(); ++x) gauge_sup = std::max(gauge_sup, map_norm(phi.at(x).gauge));
      const double xi_plus = 1.5 + gauge_sup;
      const double xi_minus = 0.5;
      const double eps = in.rng.uniform(0.05, 1.0) * epsilon_bound(xi_plus, xi_minus, gauge_sup);
      const NormBound b = flow_norm_bound_check(phi, MatrixMap::identity(n), in.rng.matrix(n, n),
                                                grid_end(g), xi_plus, xi_minus, eps);
      return Outcome{{in.bound("flow-norm-bound", 9, shape(g), b.norm, b.bound, kBoundSlack)}, {}};
    });
    plan.tasks.emplace_back([ctx, i] {
      Instance in(ctx, 28, i);
      const Grid g = random_grid(ctx.grid(i), in.rng.integer(1, 2), in.rng.integer(1, 2), in.rng);
      const Kernel t = random_kernel(g, in.rng, 0.5);
      const double xp = in.rng.uniform(0.5, 3.0), xm = in.rng.uniform(0.2, 2.0);
      const double lhs = operator_scale_norm(iota(kernel_adjoint(t)), 1.0 / xm, 1.0 / xp);
      const double rhs = operator_scale_norm(iota(t), xp, xm);
      return Outcome{{in.record("adjoint-norm-duality", 9, shape(g),
                                std::abs(lhs - rhs) / std::max(rhs, 1e-300), kDualityTolerance)},
                     {}};
    });
  }
  return plan;
}

struct SuiteSpec {
  std::string name;
  std::vector<int> defaults;
  int max_points;
  bool sweeps;
  Plan (*build)(const Context&);
};

const std::vector<SuiteSpec>& specs() {
  static const std::vector<SuiteSpec> all{
      {"exact-identities", {1, 2, 3}, 3, false, exact_identities},
      {"multiplicativity", {2, 4, 8, 16}, 20, true, multiplicativity},
      {"ito", {2, 4, 8}, 8, true, ito},
      {"evolution", {2, 4, 8, 16}, 20, true, evolution},
      {"pseudo-fock", {1, 2, 3}, 3, false, pseudo_fock},
      {"flows", {2, 4, 8}, 8, true, flows},
      {"norms", {1, 2, 3}, 4, false, norms},
  };
  return all;
}

const SuiteSpec& find_spec(const std::string& name) {
  for (const auto& s : specs()) {
    if (s.name == name) return s;
  }
  std::string valid;
  for (const auto& s : suite_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw UnknownSuiteError("unknown suite '" + name + "'; valid suites: " + valid);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : specs()) out.push_back(s.name);
    return out;
  }();
  return names;
}

std::vector<int> default_grids(const std::string& suite) { return find_spec(suite).defaults; }

SuiteReport run_suite(const std::string& name, const SuiteOptions& options) {
  const SuiteSpec& spec = find_spec(name);
  Context ctx;
  ctx.suite = name;
  ctx.seed = options.seed;
  ctx.grids = options.grids.empty() ? spec.defaults : options.grids;
  ctx.tol = options.tolerance;
  ctx.samples = options.samples;
  for (int m : ctx.grids) {
    if (m < 1 || m > spec.max_points) {
      throw DomainError("suite " + name + ": grid size " + std::to_string(m) +
                        " outside 1.." + std::to_string(spec.max_points));
    }
  }
  if (spec.sweeps) {
    if (ctx.grids.size() < 3 || !std::is_sorted(ctx.grids.begin(), ctx.grids.end()) ||
        std::adjacent_find(ctx.grids.begin(), ctx.grids.end()) != ctx.grids.end()) {
      throw DomainError("suite " + name + ": needs at least three increasing grid sizes");
    }
  }
  if (ctx.samples < 1) throw DomainError("suite " + name + ": samples must be positive");
  if (!(ctx.tol > 0.0)) throw DomainError("suite " + name + ": tolerance must be positive");

  const auto start = Clock::now();
  Plan plan = spec.build(ctx);
  std::vector<Outcome> outcomes(plan.tasks.size());
  parallel_for(static_cast<int>(plan.tasks.size()), resolve_threads(options.threads), [&](int k) {
    const auto t0 = Clock::now();
    Outcome o = plan.tasks[static_cast<std::size_t>(k)]();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    for (auto& c : o.cases) c.seconds = secs;
    for (auto& r : o.sweeps) r.seconds = secs;
    outcomes[static_cast<std::size_t>(k)] = std::move(o);
  });

  SuiteReport report;
  report.suite = name;
  report.seed = ctx.seed;
  report.grids = ctx.grids;
  report.tolerance = ctx.tol;
  for (auto& o : outcomes) {
    for (auto& c : o.cases) report.cases.push_back(std::move(c));
    for (auto& r : o.sweeps) report.convergence.push_back(std::move(r));
  }
  if (plan.finish) plan.finish(report);
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace fockflow

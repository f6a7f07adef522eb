#include "fockflow/evolution.hpp"

#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "fockflow/integrals.hpp"
#include "fockflow/legs.hpp"

namespace fockflow {

namespace {

void require_shapes(const Grid& g, const std::vector<TriangularMatrix>& values) {
  if (static_cast<int>(values.size()) != g.size()) {
    throw StructureError("point field: need one triangular matrix per grid point");
  }
  const Index n = g.system_dim();
  for (const TriangularMatrix& m : values) {
    if (m.outer() != n || m.inner() != n * g.noise_dim()) {
      throw StructureError("point field: block sizes disagree with the grid dimensions");
    }
  }
}

bool corners_are(const TriangularMatrix& m, const Matrix& value) {
  return m.minus() == value && m.plus() == value;
}

}  // namespace

PointField::PointField(Grid grid, std::vector<TriangularMatrix> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require_shapes(grid_, values_);
}

PointField PointField::constant(const Grid& grid, const TriangularMatrix& value) {
  return {grid, std::vector<TriangularMatrix>(grid.size(), value)};
}

GeneratorField::GeneratorField(Grid grid, std::vector<TriangularMatrix> scattering)
    : PointField(std::move(grid), std::move(scattering)) {
  const Matrix one = fockflow::identity(this->grid().system_dim());
  for (const TriangularMatrix& m : values()) {
    if (!corners_are(m, one)) throw StructureError("generator field: corner blocks must be identity");
  }
}

GeneratorField GeneratorField::identity(const Grid& grid) {
  const Index n = grid.system_dim();
  return constant(grid, TriangularMatrix::identity(n, n * grid.noise_dim()));
}

GeneratorField GeneratorField::constant(const Grid& grid, const TriangularMatrix& f) {
  return {grid, std::vector<TriangularMatrix>(grid.size(), f)};
}

HamiltonianField::HamiltonianField(Grid grid, std::vector<TriangularMatrix> hamiltonian)
    : PointField(std::move(grid), std::move(hamiltonian)) {
  const Index n = this->grid().system_dim();
  const Matrix zero = Matrix::Zero(n, n);
  for (const TriangularMatrix& m : values()) {
    if (!corners_are(m, zero)) throw StructureError("Hamiltonian field: corner blocks must vanish");
  }
}

HamiltonianField HamiltonianField::constant(const Grid& grid, const TriangularMatrix& h) {
  return {grid, std::vector<TriangularMatrix>(grid.size(), h)};
}

TriangularMatrix hamiltonian_matrix(const Matrix& gauge, const Matrix& creation,
                                    const Matrix& annihilation, const Matrix& time) {
  const Matrix zero = Matrix::Zero(time.rows(), time.cols());
  return TriangularMatrix::from_blocks(zero, annihilation, time, gauge, creation, zero);
}

double pseudo_hermiticity_defect(const TriangularMatrix& h) {
  return spectral_norm((pseudo_conjugate(h) - h).full());
}

double pseudo_unitarity_defect(const TriangularMatrix& s) {
  const Matrix p = (pseudo_conjugate(s) * s).full();
  return spectral_norm(p - Matrix::Identity(p.rows(), p.cols()));
}

double pseudo_unitarity_check(const GeneratorField& f) {
  double worst = 0.0;
  for (const TriangularMatrix& s : f.values()) worst = std::max(worst, pseudo_unitarity_defect(s));
  return worst;
}

namespace {

// phi1(z) = (e^z - 1) / z and phi2(z) = (e^z - 1 - z) / z^2, by series near 0.
std::pair<cplx, cplx> phi_pair(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term{1.0, 0.0};
    cplx p1{0.0, 0.0}, p2{0.0, 0.0};
    for (int k = 1; k < 30; ++k) {
      term /= static_cast<double>(k);  // z^(k-1) / k!
      p1 += term;
      p2 += term / static_cast<double>(k + 1);
      term *= z;
    }
    return {p1, p2};
  }
  const cplx e = std::exp(z);
  return {(e - 1.0) / z, (e - 1.0 - z) / (z * z)};
}

TriangularMatrix exponential_blocks(const TriangularMatrix& h) {
  const Matrix full = (cplx{0.0, -1.0} * h.full()).exp();
  const Index n = h.outer();
  const Index m = h.inner();
  // Blocks below the diagonal vanish identically; only their rounding is dropped.
  return TriangularMatrix::from_blocks(full.block(0, 0, n, n), full.block(0, n, n, m),
                                       full.block(0, n + m, n, n), full.block(n, n, m, m),
                                       full.block(n, n + m, m, n), full.block(n + m, n + m, n, n));
}

}  // namespace

TriangularMatrix scattering_matrix(const TriangularMatrix& h) {
  const Index n = h.outer();
  if (!h.minus().isZero(0.0) || !h.plus().isZero(0.0)) return exponential_blocks(h);
  const Matrix& gauge = h.gauge();
  const Eigen::ComplexSchur<Matrix> schur(gauge);
  const Matrix& tri = schur.matrixT();
  const double scale = std::max(1.0, spectral_norm(gauge));
  const Matrix off = tri.triangularView<Eigen::StrictlyUpper>();
  if (off.norm() > 1e-13 * scale) return exponential_blocks(h);
  // Normal gauge block: apply the phi functions in its unitary eigenbasis.
  const Matrix& q = schur.matrixU();
  const Index m = gauge.rows();
  Eigen::VectorXcd e(m), p1(m), p2(m);
  for (Index i = 0; i < m; ++i) {
    const cplx z = cplx{0.0, -1.0} * tri(i, i);
    e(i) = std::exp(z);
    std::tie(p1(i), p2(i)) = phi_pair(z);
  }
  const cplx mi{0.0, -1.0};
  const Matrix phi1 = q * p1.asDiagonal() * q.adjoint();
  const Matrix phi2 = q * p2.asDiagonal() * q.adjoint();
  const Matrix one = identity(n);
  return TriangularMatrix::from_blocks(one, mi * h.annihilation() * phi1,
                                       mi * h.time() - h.annihilation() * phi2 * h.creation(),
                                       q * e.asDiagonal() * q.adjoint(),
                                       mi * phi1 * h.creation(), one);
}

GeneratorField hamiltonian_to_scattering(const HamiltonianField& h) {
  std::vector<TriangularMatrix> f;
  f.reserve(h.size());
  for (const TriangularMatrix& m : h.values()) {
    TriangularMatrix s = scattering_matrix(m);
    const Matrix one = identity(m.outer());
    s.set_minus(one);
    s.set_plus(one);
    f.push_back(std::move(s));
  }
  return {h.grid(), std::move(f)};
}

TriangularMatrix poissonian_hamiltonian(const Matrix& gauge, Index system_dim) {
  const Index m = gauge.rows();
  return hamiltonian_matrix(gauge, Matrix::Zero(m, system_dim), Matrix::Zero(system_dim, m),
                            Matrix::Zero(system_dim, system_dim));
}

TriangularMatrix brownian_hamiltonian(const Matrix& coupling) {
  const Index n = coupling.cols();
  const Index m = coupling.rows();
  return hamiltonian_matrix(Matrix::Zero(m, m), cplx{0.0, -1.0} * coupling,
                            cplx{0.0, 1.0} * coupling.adjoint(), Matrix::Zero(n, n));
}

TriangularMatrix lebesgue_hamiltonian(const Matrix& h, int noise_dim) {
  const Index n = h.rows();
  const Index m = n * noise_dim;
  return hamiltonian_matrix(Matrix::Zero(m, m), Matrix::Zero(m, n), Matrix::Zero(n, m), h);
}

Kernel chronological_kernel(double t, const GeneratorField& f, const Matrix& t0) {
  const Grid& g = f.grid();
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  const int m = g.size();
  if (m > kMaxKernelPoints) throw DomainError("chronological kernel: too many grid points");
  if (t0.rows() != n || t0.cols() != n) throw StructureError("chronological kernel: T0 shape");
  const Chain past = points_before(g, t);
  const Matrix noise_identity = identity(n * d);
  Kernel out(g);
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable tab = table_from_code(code, m);
    const Chain future = tab.support() - past;
    if (!future.subset_of(tab.gauge)) continue;
    LegBlock acc{t0, {}, {}};
    for (int x : tab.support().points()) {
      const Legs here{x};
      LegBlock factor;
      if (!past.contains(x)) {
        factor = {noise_identity, here, here};
      } else {
        const TriangularMatrix& fx = f.at(x);
        switch (tab.slot_of(x)) {
          case Slot::annihilation: factor = {fx.annihilation(), {}, here}; break;
          case Slot::time: factor = {fx.time(), {}, {}}; break;
          case Slot::gauge: factor = {fx.gauge(), here, here}; break;
          case Slot::creation: factor = {fx.creation(), here, {}}; break;
          case Slot::none: continue;
        }
      }
      acc = semitensor(factor, acc, n, d);
    }
    out.set(tab, acc.arranged(n, d, tab.out_legs(), tab.in_legs()).m);
  }
  return out;
}

Kernel chronological_step(const Kernel& t, const GeneratorField& f, int point) {
  const Grid& g = f.grid();
  const TriangularMatrix& fx = f.at(point);
  const Chain others = Chain::all(g.size()) - Chain::single(point);
  Kernel step(g);
  const std::pair<Slot, Matrix> blocks[] = {{Slot::none, fx.minus()},
                                            {Slot::annihilation, fx.annihilation()},
                                            {Slot::time, fx.time()},
                                            {Slot::gauge, fx.gauge()},
                                            {Slot::creation, fx.creation()}};
  for (const auto& [slot, block] : blocks) {
    const KernelTable base =
        slot == Slot::none ? KernelTable{} : KernelTable::elementary(point, slot);
    for_each_subset(others, [&](Chain extra) {
      KernelTable tab = base;
      tab.gauge = tab.gauge | extra;
      step.set(tab, gauge_extended_block(g, base, block, extra));
    });
  }
  return kernel_product(step, t);
}

KernelProcess evolution_process(const GeneratorField& f, const Matrix& t0) {
  return [f, t0](double t) { return chronological_kernel(t, f, t0); };
}

FockOperator solve_evolution(double t, const GeneratorField& f, const Matrix& t0) {
  return iota(chronological_kernel(t, f, t0), make_space(f.grid()));
}

GateProduct evolution_gates(double t, const GeneratorField& f, const Matrix& t0) {
  const Grid& g = f.grid();
  const Index size = g.system_dim() * (1 + g.noise_dim());
  std::vector<Matrix> gates;
  gates.reserve(g.size());
  for (int x = 0; x < g.size(); ++x) {
    gates.push_back(g.time(x) < t ? point_gate(f.at(x), g.weight(x)) : identity(size));
  }
  return {make_space(g), t0, std::move(gates)};
}

double unitarity_defect(const GateProduct& u, double xi_plus, double xi_minus) {
  const LinearMap m = u.map();
  const LinearMap defect =
      difference(compose(fock_adjoint(m, u.space_ptr()), m), identity_map(m.dim));
  return operator_scale_norm(defect, u.space_ptr(), xi_plus, xi_minus);
}

double integral_equation_defect(double t, const GeneratorField& f, const Matrix& t0,
                                double xi_plus, double xi_minus) {
  if (f.grid().noise_dim() != 1) {
    throw DomainError("integral equation: only implemented for d = 1");
  }
  return increment_defect(evolution_process(f, t0), f.grid(), t, xi_plus, xi_minus);
}

CanonicalDecomposition canonical_decomposition(const TriangularMatrix& h, double null_tolerance) {
  if (!h.minus().isZero(0.0) || !h.plus().isZero(0.0)) {
    throw DomainError("canonical decomposition: Hamiltonian corners must vanish");
  }
  const double scale = std::max(1.0, spectral_norm(h.full()));
  if (pseudo_hermiticity_defect(h) > 1e-12 * scale) {
    throw DomainError("canonical decomposition requires a pseudo-Hermitian Hamiltonian");
  }
  const Matrix h00 = (h.gauge() + h.gauge().adjoint()) / 2.0;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(h00);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const double cutoff = null_tolerance * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const Index m = h00.rows();
  Eigen::VectorXcd inverse(m), phase(m), null(m);
  for (Index i = 0; i < m; ++i) {
    const bool zero = std::abs(lambda(i)) <= cutoff;
    inverse(i) = zero ? 0.0 : 1.0 / lambda(i);
    null(i) = zero ? 1.0 : 0.0;
    phase(i) = std::exp(cplx{0.0, -lambda(i)}) - 1.0;
  }
  const Matrix coupling = h.creation();
  CanonicalDecomposition out{.generator = scattering_matrix(h) -
                                          TriangularMatrix::identity(h.outer(), h.inner()),
                             .poissonian = TriangularMatrix(h.outer(), h.inner()),
                             .brownian = TriangularMatrix(h.outer(), h.inner()),
                             .lebesgue = TriangularMatrix(h.outer(), h.inner()),
                             .range_part = v * inverse.asDiagonal() * v.adjoint() * coupling,
                             .kernel_part = I_unit * (v * null.asDiagonal() * v.adjoint() * coupling),
                             .hamiltonian = {}};
  const Matrix& f = out.range_part;
  const Matrix& e = out.kernel_part;
  const Matrix l00 = v * phase.asDiagonal() * v.adjoint();
  out.hamiltonian = h.time() - f.adjoint() * h00 * f;
  out.poissonian.set_annihilation(f.adjoint() * l00);
  out.poissonian.set_time(f.adjoint() * l00 * f);
  out.poissonian.set_gauge(l00);
  out.poissonian.set_creation(l00 * f);
  out.brownian.set_annihilation(e.adjoint());
  out.brownian.set_time(-0.5 * e.adjoint() * e);
  out.brownian.set_creation(-e);
  out.lebesgue.set_time(cplx{0.0, -1.0} * out.hamiltonian);
  return out;
}

FockOperator second_quantization(double t, const std::vector<TriangularMatrix>& l,
                                 const Grid& grid) {
  const int d = grid.noise_dim();
  if (static_cast<int>(l.size()) != grid.size()) {
    throw StructureError("second quantization: need one matrix per grid point");
  }
  std::vector<PointFactor> factors;
  factors.reserve(l.size());
  for (int x = 0; x < grid.size(); ++x) {
    const TriangularMatrix& lx = l[x];
    if (lx.outer() != 1 || lx.inner() != d) {
      throw StructureError("second quantization: blocks must act on the noise space");
    }
    if (!lx.minus().isZero(0.0) || !lx.plus().isZero(0.0)) {
      throw DomainError("second quantization: corner entries must vanish");
    }
    if (!(grid.time(x) < t)) {
      factors.push_back(PointFactor::unit(d));
      continue;
    }
    const TriangularMatrix f = lx + TriangularMatrix::identity(1, d);
    factors.push_back(PointFactor::from_triangular(f.full(), d));
  }
  return iota(product_kernel(identity(grid.system_dim()), factors, grid), make_space(grid));
}

NormBound evolution_norm_bound_check(const GeneratorField& f, double t, const Matrix& t0,
                                     double xi_plus, double xi_minus, double epsilon) {
  const Grid& g = f.grid();
  double gauge_sup = 0.0;
  double exponent = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    if (!(g.time(x) < t)) continue;
    const TriangularMatrix& s = f.at(x);
    gauge_sup = std::max(gauge_sup, spectral_norm(s.gauge()));
    const double ann = spectral_norm(s.annihilation());
    const double cre = spectral_norm(s.creation());
    exponent += g.weight(x) * (spectral_norm(s.time()) + (ann * ann + cre * cre) / (2.0 * epsilon));
  }
  const double admissible = epsilon_bound(xi_plus, xi_minus, gauge_sup);
  if (!(epsilon > 0.0) || epsilon > admissible) {
    throw DomainError("evolution norm bound: epsilon must lie in (0, " +
                      std::to_string(admissible) + "]");
  }
  const GateProduct u = evolution_gates(t, f, t0);
  double norm = 0.0;
  if (u.space().dim() <= 512) {
    norm = operator_scale_norm(u.dense(), xi_plus, xi_minus);
  } else {
    norm = operator_scale_norm(u.map(), u.space_ptr(), xi_plus, xi_minus);
  }
  return {norm, spectral_norm(t0) * std::exp(exponent)};
}

}  // namespace fockflow

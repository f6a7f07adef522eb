#pragma once

#include <vector>

#include "fockflow/fock_operator.hpp"
#include "fockflow/gates.hpp"
#include "fockflow/ito.hpp"
#include "fockflow/triangular.hpp"

namespace fockflow {

// One triangular matrix per grid point with outer size n and inner size n d.
// A generator field has identity corners; a Hamiltonian field has zero ones.
class PointField {
 public:
  PointField(Grid grid, std::vector<TriangularMatrix> values);

  [[nodiscard]] static PointField constant(const Grid& grid, const TriangularMatrix& value);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] int size() const { return grid_.size(); }
  [[nodiscard]] const TriangularMatrix& at(int point) const { return values_[point]; }
  [[nodiscard]] const std::vector<TriangularMatrix>& values() const { return values_; }

 private:
  Grid grid_;
  std::vector<TriangularMatrix> values_;
};

class GeneratorField : public PointField {
 public:
  // Throws StructureError unless every corner block is the identity.
  GeneratorField(Grid grid, std::vector<TriangularMatrix> scattering);
  [[nodiscard]] static GeneratorField identity(const Grid& grid);
  [[nodiscard]] static GeneratorField constant(const Grid& grid, const TriangularMatrix& f);
};

class HamiltonianField : public PointField {
 public:
  // Throws StructureError unless every corner block is zero.
  HamiltonianField(Grid grid, std::vector<TriangularMatrix> hamiltonian);
  [[nodiscard]] static HamiltonianField constant(const Grid& grid, const TriangularMatrix& h);
};

// Triangular matrix with zero corners from its four blocks.
[[nodiscard]] TriangularMatrix hamiltonian_matrix(const Matrix& gauge, const Matrix& creation,
                                                  const Matrix& annihilation, const Matrix& time);

// ||H^star - H|| for the plain pseudo-conjugation.
[[nodiscard]] double pseudo_hermiticity_defect(const TriangularMatrix& h);

// ||S^star S - 1||, the spectral norm of the full triangular difference.
[[nodiscard]] double pseudo_unitarity_defect(const TriangularMatrix& s);
[[nodiscard]] double pseudo_unitarity_check(const GeneratorField& f);

// exp(-i H) of the triangular matrix.
[[nodiscard]] TriangularMatrix scattering_matrix(const TriangularMatrix& h);
[[nodiscard]] GeneratorField hamiltonian_to_scattering(const HamiltonianField& h);

// Triangular factors of the three canonical evolution types.
[[nodiscard]] TriangularMatrix poissonian_hamiltonian(const Matrix& gauge, Index system_dim);
[[nodiscard]] TriangularMatrix brownian_hamiltonian(const Matrix& coupling);
[[nodiscard]] TriangularMatrix lebesgue_hamiltonian(const Matrix& h, int noise_dim);

// T^t(kappa) = F(x_m) ... F(x_1) T0 over the points of kappa before t, with
// the identity extension at the later points. At most kMaxKernelPoints points.
[[nodiscard]] Kernel chronological_kernel(double t, const GeneratorField& f, const Matrix& t0);

// [F(x) . T](kappa): one step of the recurrence through the kernel product.
[[nodiscard]] Kernel chronological_step(const Kernel& t, const GeneratorField& f, int point);

[[nodiscard]] KernelProcess evolution_process(const GeneratorField& f, const Matrix& t0);

// U^t = iota(T^t) as a dense operator.
[[nodiscard]] FockOperator solve_evolution(double t, const GeneratorField& f, const Matrix& t0);

// U^t as a product of per-point gates, usable beyond the dense range.
[[nodiscard]] GateProduct evolution_gates(double t, const GeneratorField& f, const Matrix& t0);

// ||U^t* U^t - 1|| in the (xi_plus, xi_minus) norm, matrix-free.
[[nodiscard]] double unitarity_defect(const GateProduct& u, double xi_plus, double xi_minus);

// ||U^t - U^0 - Lambda^t(D)|| with D = G - U the triangular increment. Requires d = 1.
[[nodiscard]] double integral_equation_defect(double t, const GeneratorField& f, const Matrix& t0,
                                              double xi_plus, double xi_minus);

// L = exp(-iH) - I split into Poissonian, Brownian and Lebesgue parts. The
// coupling H+0 = H00 F - iE is split along the range and kernel of H00.
struct CanonicalDecomposition {
  TriangularMatrix generator;  // L
  TriangularMatrix poissonian;
  TriangularMatrix brownian;
  TriangularMatrix lebesgue;
  Matrix range_part;   // F
  Matrix kernel_part;  // E
  Matrix hamiltonian;  // H+- - F^* H00 F
};

// Requires a pseudo-Hermitian H; eigenvalues of H00 below `null_tolerance`
// times max(1, ||H00||) count as zero.
[[nodiscard]] CanonicalDecomposition canonical_decomposition(const TriangularMatrix& h,
                                                             double null_tolerance = 1e-12);

// Gamma_[0,t)(l) = iota(I (x) (1 + l)^(x)), l(x) with zero corners over the
// noise space only; the system dimension comes from the grid.
[[nodiscard]] FockOperator second_quantization(double t, const std::vector<TriangularMatrix>& l,
                                               const Grid& grid);

struct NormBound {
  double norm = 0.0;
  double bound = 0.0;
  [[nodiscard]] bool holds() const { return norm <= bound * (1.0 + 1e-9); }
};

// ||U^t|| in the (xi_plus, xi_minus) norm against
// ||T0|| exp(sum over x before t of w (||L+-|| + (||L0-||^2 + ||L+0||^2) / 2 eps)).
// Throws DomainError outside 0 < eps <= epsilon_bound(xi_plus, xi_minus, sup ||F00||).
[[nodiscard]] NormBound evolution_norm_bound_check(const GeneratorField& f, double t,
                                                   const Matrix& t0, double xi_plus,
                                                   double xi_minus, double epsilon);

}  // namespace fockflow

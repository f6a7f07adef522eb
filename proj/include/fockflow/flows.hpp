#pragma once

#include <functional>
#include <vector>

#include "fockflow/evolution.hpp"
#include "fockflow/fock_operator.hpp"
#include "fockflow/ito.hpp"

namespace fockflow {

// A linear map between matrix spaces, stored as its action on column-major
// vectorizations.
class MatrixMap {
 public:
  MatrixMap(Index in_rows, Index in_cols, Index out_rows, Index out_cols, Matrix action);

  // Samples a linear function on the matrix units.
  [[nodiscard]] static MatrixMap from_function(Index in_rows, Index in_cols,
                                               const std::function<Matrix(const Matrix&)>& fn);
  [[nodiscard]] static MatrixMap identity(Index n);
  // A -> A (x) I_k with the new factor least significant.
  [[nodiscard]] static MatrixMap ampliation(Index n, Index k);
  [[nodiscard]] static MatrixMap zero(Index in_rows, Index in_cols, Index out_rows, Index out_cols);

  [[nodiscard]] Index in_rows() const { return in_rows_; }
  [[nodiscard]] Index in_cols() const { return in_cols_; }
  [[nodiscard]] Index out_rows() const { return out_rows_; }
  [[nodiscard]] Index out_cols() const { return out_cols_; }
  [[nodiscard]] const Matrix& action() const { return action_; }

  [[nodiscard]] Matrix operator()(const Matrix& a) const;
  // Applies the map to every (r, c) sub-block of an operator whose row index
  // is i * row_legs + r and column index j * col_legs + c; the map's own output
  // indices become the most significant ones.
  [[nodiscard]] Matrix apply_passive(const Matrix& b, Index row_legs, Index col_legs) const;

  [[nodiscard]] MatrixMap operator+(const MatrixMap& o) const;
  [[nodiscard]] MatrixMap operator-(const MatrixMap& o) const;
  // (this after o).
  [[nodiscard]] MatrixMap after(const MatrixMap& o) const;

 private:
  Index in_rows_, in_cols_, out_rows_, out_cols_;
  Matrix action_;
};

// sup over ||A|| <= 1 of ||m(A)||, estimated from below by monotone ascent over
// unitaries from several starts; exact when the input is 1 x 1.
[[nodiscard]] double map_norm(const MatrixMap& m);

// The four off-corner components of phi(x, .) for one point; both corners are
// the identity map.
struct PointStructure {
  MatrixMap annihilation;  // n x n -> n x nd
  MatrixMap time;          // n x n -> n x n
  MatrixMap gauge;         // n x n -> nd x nd
  MatrixMap creation;      // n x n -> nd x n

  [[nodiscard]] static PointStructure trivial(Index n, int d);
  [[nodiscard]] const MatrixMap& component(Slot s) const;
  // phi minus the trivial structure A -> A (x) 1.
  [[nodiscard]] PointStructure lambda() const;
  [[nodiscard]] TriangularMatrix operator()(const Matrix& a) const;
};

class StructureMap {
 public:
  StructureMap(Grid grid, std::vector<PointStructure> points);

  // phi(x, A) = A (x) 1 at every point.
  [[nodiscard]] static StructureMap trivial(const Grid& grid);
  // Samples phi(x, .) on matrix units; the corners must reproduce A.
  [[nodiscard]] static StructureMap from_function(
      const Grid& grid, const std::function<TriangularMatrix(int, const Matrix&)>& fn);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const PointStructure& at(int point) const { return points_[point]; }
  [[nodiscard]] TriangularMatrix operator()(int point, const Matrix& a) const {
    return points_[point](a);
  }

 private:
  Grid grid_;
  std::vector<PointStructure> points_;
};

// phi(x, A) = F(x)^* (A (x) 1) F(x).
[[nodiscard]] StructureMap spatial_structure_map(const GeneratorField& f);

// Matrix units E_ij spanning the full algebra.
[[nodiscard]] std::vector<Matrix> matrix_units(Index n);

// Largest of ||phi(x, A^* B) - phi(x, A)^* phi(x, B)|| over generators and
// their pairwise products, and ||phi(x, I) - identity||, over all points.
[[nodiscard]] double multiplicativity_defect(const StructureMap& phi,
                                             const std::vector<Matrix>& generators);
// Largest ||phi(x, A^*) - phi(x, A)^*|| over the matrix units.
[[nodiscard]] double hermiticity_defect(const StructureMap& phi);

enum class NestingOrder { earliest_outermost, latest_outermost };

// T^t(table) = tau0[phi(x1, phi(x2, ... phi(xm, A)))] with the slot component
// of each point, identity beyond t.
[[nodiscard]] Kernel flow_kernel(double t, const StructureMap& phi, const MatrixMap& tau0,
                                 const Matrix& a,
                                 NestingOrder order = NestingOrder::earliest_outermost);
// The same nesting with lambda = phi - j and zero beyond t.
[[nodiscard]] Kernel flow_integrand(double t, const StructureMap& phi, const MatrixMap& tau0,
                                    const Matrix& a,
                                    NestingOrder order = NestingOrder::earliest_outermost);

// Structure maps that depend on the table of earlier points.
using ContextualStructure = std::function<PointStructure(int point, const KernelTable& earlier)>;
[[nodiscard]] Kernel flow_kernel(double t, const Grid& grid, const ContextualStructure& phi,
                                 const MatrixMap& tau0, const Matrix& a);

[[nodiscard]] FockOperator flow(double t, const StructureMap& phi, const MatrixMap& tau0,
                                const Matrix& a,
                                NestingOrder order = NestingOrder::earliest_outermost);

[[nodiscard]] KernelProcess flow_process(const StructureMap& phi, const MatrixMap& tau0,
                                         const Matrix& a);

// ||j^t(A^* A) - j^t(A)^* j^t(A)|| in the (xi_plus, xi_minus) norm.
[[nodiscard]] double homomorphism_defect(double t, const StructureMap& phi, const MatrixMap& tau0,
                                         const Matrix& a, double xi_plus, double xi_minus);

// ||j^t(A) - j^0(A) - Lambda^t(D)|| with D read off the flow kernel. Requires d = 1.
[[nodiscard]] double langevin_defect(double t, const StructureMap& phi, const MatrixMap& tau0,
                                     const Matrix& a, double xi_plus, double xi_minus);

// Smallest singular value of A -> j^t(A) over the full matrix algebra.
[[nodiscard]] double flow_injectivity(double t, const StructureMap& phi, const MatrixMap& tau0);

struct TransformDefect {
  double kernel = 0.0;
  double operator_level = 0.0;
};

// Compares U^t* B^t U^t - U^0* B^0 U^0 with the integral of
// G_U^* G_B G_U - U_U^* U_B U_U, for the evolution generated by F.
// Requires d = 1.
[[nodiscard]] TransformDefect transformed_process_equation_check(double t, const GeneratorField& f,
                                                                 const KernelProcess& b,
                                                                 double xi_plus, double xi_minus);

// ||j^t(A)|| in the (xi_plus, xi_minus) norm against
// ||tau0|| ||A|| exp(sum over x before t of w (|l+-| + (|l+0|^2 + |l0-|^2) / 2 eps)).
// Throws DomainError if ||A|| > 1 or eps lies outside (0, epsilon_bound(...)].
[[nodiscard]] NormBound flow_norm_bound_check(const StructureMap& phi, const MatrixMap& tau0,
                                              const Matrix& a, double t, double xi_plus,
                                              double xi_minus, double epsilon);

}  // namespace fockflow

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fockflow/fock_operator.hpp"
#include "fockflow/triangular.hpp"

namespace fockflow {

// An operator on the coordinates of a FockSpace known through its action and
// the action of its coordinate (unweighted) adjoint.
struct LinearMap {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_adjoint;
};

[[nodiscard]] LinearMap dense_map(Matrix m);
[[nodiscard]] LinearMap identity_map(Index dim);
// a after b.
[[nodiscard]] LinearMap compose(LinearMap a, LinearMap b);
[[nodiscard]] LinearMap difference(LinearMap a, LinearMap b);

// Largest singular value from Lanczos iterations on A^H A with full
// reorthogonalization. Exact once max_steps reaches the dimension.
[[nodiscard]] double largest_singular_value(const LinearMap& a, int max_steps = 80,
                                            double tol = 1e-13);

// Weighted Fock adjoint W^-2 A^H W^2 of a map.
[[nodiscard]] LinearMap fock_adjoint(const LinearMap& a, const SpacePtr& space);

// The (xi_plus, xi_minus) operator norm, without forming the matrix.
[[nodiscard]] double operator_scale_norm(const LinearMap& a, const SpacePtr& space,
                                         double xi_plus, double xi_minus);

// Gate of a per-point triangular factor with weight w, on H (x) (C + E_x):
// [[I + w time, w annihilation], [creation, gauge]].
[[nodiscard]] Matrix point_gate(const TriangularMatrix& f, double w);
[[nodiscard]] Matrix point_gate(const PointFactor& f, double w);

// `initial` on the system, then gate 0, gate 1, ... in time order. Gate x acts
// on the system and the factor of point x; it must be n(1 + d) square, with
// the system block first and then the (system, noise) block.
class GateProduct {
 public:
  GateProduct(SpacePtr space, Matrix initial, std::vector<Matrix> gates);

  [[nodiscard]] const FockSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }

  [[nodiscard]] Vector apply(const Vector& v) const;
  [[nodiscard]] Vector apply_adjoint(const Vector& v) const;
  [[nodiscard]] LinearMap map() const;
  [[nodiscard]] FockOperator dense() const;

 private:
  void apply_system(Vector& v, const Matrix& op) const;
  void apply_gate(Vector& v, int point, const Matrix& gate) const;

  SpacePtr space_;
  Matrix initial_;
  std::vector<Matrix> gates_;
  // Per point, the coordinates a gate acts on: row r of column k is the r-th
  // gate index of the k-th independent slice.
  std::shared_ptr<const std::vector<Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>>> slices_;
};

// iota(system (x) f^) for a product kernel, on any grid size.
[[nodiscard]] GateProduct product_gates(const Matrix& system, const std::vector<PointFactor>& f,
                                        const SpacePtr& space);

// ||iota(S.T) - iota(S) iota(T)|| in the (xi_plus, xi_minus) norm for the
// product kernels S = x (x) f^ and T = y (x) g^, without forming either kernel.
[[nodiscard]] double product_multiplicativity_defect(const Matrix& x,
                                                     const std::vector<PointFactor>& f,
                                                     const Matrix& y,
                                                     const std::vector<PointFactor>& g,
                                                     const Grid& grid, double xi_plus,
                                                     double xi_minus);

}  // namespace fockflow

#pragma once

#include "fockflow/chain_space.hpp"
#include "fockflow/kernel.hpp"

namespace fockflow {

// Dense operator on H (x) F in the coordinates of a FockSpace. Coordinates are
// not orthonormal: the Fock inner product weights chain blocks by w(chain).
class FockOperator {
 public:
  FockOperator(SpacePtr space, Matrix m);

  [[nodiscard]] static FockOperator identity(SpacePtr space);
  [[nodiscard]] static FockOperator zero(SpacePtr space);

  [[nodiscard]] const FockSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
  [[nodiscard]] const Grid& grid() const { return space_->grid(); }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] Matrix& matrix() { return m_; }

  [[nodiscard]] FockVector apply(const FockVector& a) const;

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  [[nodiscard]] FockOperator operator+(const FockOperator& o) const;
  [[nodiscard]] FockOperator operator-(const FockOperator& o) const;
  [[nodiscard]] FockOperator operator*(const FockOperator& o) const;
  [[nodiscard]] FockOperator operator*(cplx s) const;

 private:
  SpacePtr space_;
  Matrix m_;
};

// sqrt(xi^|chain| w(chain)) for every coordinate.
[[nodiscard]] Eigen::VectorXd scale_weights(const FockSpace& space, double xi);

// Adjoint with respect to the weighted Fock inner product.
[[nodiscard]] FockOperator fock_adjoint(const FockOperator& u);

// sup ||U a||(xi_minus) / ||a||(xi_plus).
[[nodiscard]] double operator_scale_norm(const FockOperator& u, double xi_plus, double xi_minus);

// Operator norm on the plain Fock space (both scales equal to 1).
[[nodiscard]] double fock_norm(const FockOperator& u);

[[nodiscard]] FockOperator iota(const Kernel& t, const SpacePtr& space);
[[nodiscard]] FockOperator iota(const Kernel& t);

// ||iota(T)^* - iota(T^*)|| in the Fock norm.
[[nodiscard]] double iota_adjoint_check(const Kernel& t);

// Largest deviation of U from the form V (x) identity on the points at or
// after t. Requires d = 1.
[[nodiscard]] double adaptedness_defect(const FockOperator& u, double t);

}  // namespace fockflow

#pragma once

#include <vector>

#include "fockflow/types.hpp"

namespace fockflow {

// Block upper-triangular 3 x 3 operator matrix indexed by (-, 0, +). The two
// corner blocks act on an `outer`-dimensional space, the middle block on an
// `inner`-dimensional one (the outer space tensored with the noise factor).
class TriangularMatrix {
 public:
  TriangularMatrix(Index outer, Index inner);
  // Throws if the strictly lower blocks are nonzero or sizes disagree.
  TriangularMatrix(Index outer, Index inner, Matrix full);

  [[nodiscard]] static TriangularMatrix identity(Index outer, Index inner);
  [[nodiscard]] static TriangularMatrix from_blocks(const Matrix& minus, const Matrix& annihilation,
                                                    const Matrix& time, const Matrix& gauge,
                                                    const Matrix& creation, const Matrix& plus);

  [[nodiscard]] Index outer() const { return outer_; }
  [[nodiscard]] Index inner() const { return inner_; }
  [[nodiscard]] const Matrix& full() const { return full_; }

  // (-,-), (-,0), (-,+), (0,0), (0,+), (+,+).
  [[nodiscard]] Matrix minus() const { return full_.block(0, 0, outer_, outer_); }
  [[nodiscard]] Matrix annihilation() const { return full_.block(0, outer_, outer_, inner_); }
  [[nodiscard]] Matrix time() const { return full_.block(0, outer_ + inner_, outer_, outer_); }
  [[nodiscard]] Matrix gauge() const { return full_.block(outer_, outer_, inner_, inner_); }
  [[nodiscard]] Matrix creation() const { return full_.block(outer_, outer_ + inner_, inner_, outer_); }
  [[nodiscard]] Matrix plus() const {
    return full_.block(outer_ + inner_, outer_ + inner_, outer_, outer_);
  }

  void set_minus(const Matrix& m) { full_.block(0, 0, outer_, outer_) = m; }
  void set_annihilation(const Matrix& m) { full_.block(0, outer_, outer_, inner_) = m; }
  void set_time(const Matrix& m) { full_.block(0, outer_ + inner_, outer_, outer_) = m; }
  void set_gauge(const Matrix& m) { full_.block(outer_, outer_, inner_, inner_) = m; }
  void set_creation(const Matrix& m) { full_.block(outer_, outer_ + inner_, inner_, outer_) = m; }
  void set_plus(const Matrix& m) {
    full_.block(outer_ + inner_, outer_ + inner_, outer_, outer_) = m;
  }

  [[nodiscard]] TriangularMatrix operator*(const TriangularMatrix& o) const;
  [[nodiscard]] TriangularMatrix operator+(const TriangularMatrix& o) const;
  [[nodiscard]] TriangularMatrix operator-(const TriangularMatrix& o) const;
  [[nodiscard]] TriangularMatrix operator*(cplx s) const;

 private:
  Index outer_;
  Index inner_;
  Matrix full_;
};

// The metric g: identity on the middle block, swapping the two corners.
[[nodiscard]] Matrix flip_metric(Index outer, Index inner);

// g M^* g, with M^* the plain conjugate transpose.
[[nodiscard]] TriangularMatrix pseudo_conjugate(const TriangularMatrix& m);

// As above with M^* the adjoint for the inner product diag(metric) on each
// of the three blocks; requires inner == outer == metric.size().
[[nodiscard]] TriangularMatrix pseudo_conjugate(const TriangularMatrix& m,
                                                const Eigen::VectorXd& metric);

// H^k; requires zero corner blocks.
[[nodiscard]] TriangularMatrix triangular_power(const TriangularMatrix& h, int k);

// G^* G - U^* U.
[[nodiscard]] TriangularMatrix ito_product_derivative(const TriangularMatrix& u,
                                                      const TriangularMatrix& g);

// Largest block spectral norm of the difference.
[[nodiscard]] double max_difference(const TriangularMatrix& a, const TriangularMatrix& b);

// Monomial coefficient * Z[factors[0]] * Z[factors[1]] * ... in the listed order.
struct Monomial {
  cplx coefficient{1.0, 0.0};
  std::vector<int> factors;
};
using OrderedPolynomial = std::vector<Monomial>;

struct CalculusPair {
  TriangularMatrix before;  // f(X)
  TriangularMatrix after;   // f(X + A)
};

[[nodiscard]] TriangularMatrix evaluate(const OrderedPolynomial& f,
                                        const std::vector<TriangularMatrix>& z);

[[nodiscard]] CalculusPair functional_calculus(const OrderedPolynomial& f,
                                               const std::vector<TriangularMatrix>& x,
                                               const std::vector<TriangularMatrix>& a);

// exp(sum of X) and exp(sum of X + A). All X_i and X_i + A_i must commute.
[[nodiscard]] CalculusPair exponential_calculus(const std::vector<TriangularMatrix>& x,
                                                const std::vector<TriangularMatrix>& a);

inline constexpr double kCommutatorTolerance = 1e-10;

}  // namespace fockflow

#pragma once

#include <limits>
#include <vector>

#include "fockflow/chain_space.hpp"
#include "fockflow/kernel.hpp"
#include "fockflow/random.hpp"

namespace fockflow {

// Three pairwise-disjoint chains: the minus, zero and plus legs of a
// pseudo-Fock coordinate.
struct ChainTriple {
  Chain minus;
  Chain zero;
  Chain plus;

  [[nodiscard]] bool valid() const {
    return minus.disjoint(zero) && minus.disjoint(plus) && zero.disjoint(plus);
  }
  [[nodiscard]] Chain support() const { return minus | zero | plus; }
  // Exchanges the minus and plus chains.
  [[nodiscard]] ChainTriple swapped() const { return {plus, zero, minus}; }

  friend auto operator<=>(const ChainTriple&, const ChainTriple&) = default;
};

inline constexpr int kMaxPseudoFockPoints = 10;

// Vector of the indefinite-metric space: one block of size n * d^|zero| per
// triple, with the zero legs in time order after the system index.
class PseudoFockVector {
 public:
  explicit PseudoFockVector(Grid grid);

  [[nodiscard]] static PseudoFockVector vacuum(const Grid& grid);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] Index block_size(const ChainTriple& t) const;
  [[nodiscard]] const Vector& block(const ChainTriple& t) const;
  [[nodiscard]] Vector& block(const ChainTriple& t);
  void set_block(const ChainTriple& t, Vector v);

  // Visits every triple in a fixed order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t code = 0; code < blocks_.size(); ++code) fn(triple_of(code), blocks_[code]);
  }
  template <class Fn>
  void for_each(Fn&& fn) {
    for (std::size_t code = 0; code < blocks_.size(); ++code) fn(triple_of(code), blocks_[code]);
  }

  PseudoFockVector& operator+=(const PseudoFockVector& o);
  [[nodiscard]] PseudoFockVector operator+(const PseudoFockVector& o) const;
  [[nodiscard]] PseudoFockVector operator-(const PseudoFockVector& o) const;
  [[nodiscard]] PseudoFockVector operator*(cplx s) const;

 private:
  [[nodiscard]] std::size_t code_of(const ChainTriple& t) const;
  [[nodiscard]] ChainTriple triple_of(std::size_t code) const;

  Grid grid_;
  std::vector<Vector> blocks_;
};

// Weights every triple by w(minus) w(zero) w(plus).
[[nodiscard]] cplx pseudo_inner(const PseudoFockVector& a, const PseudoFockVector& b);
// The same weights with the plain block inner product, no swap.
[[nodiscard]] double euclidean_norm(const PseudoFockVector& a);
// The metric involution: block (minus, zero, plus) taken from (plus, zero, minus).
[[nodiscard]] PseudoFockVector metric_swap(const PseudoFockVector& a);

[[nodiscard]] PseudoFockVector random_pseudo_fock(const Grid& grid, Rng& rng);

// Pointwise action of a kernel; no quadrature weights enter.
[[nodiscard]] PseudoFockVector decomposable_action(const Kernel& t, const PseudoFockVector& a);

// a(zero) at minus = empty, repeated over every plus chain of points before
// `horizon`.
[[nodiscard]] PseudoFockVector embed_J(const FockVector& a,
                                       double horizon = std::numeric_limits<double>::infinity());
[[nodiscard]] FockVector project_Jstar(const PseudoFockVector& a, const SpacePtr& space);

[[nodiscard]] cplx fock_inner(const FockVector& a, const FockVector& b);

struct TruncationBound {
  double norm_squared = 0.0;
  double bound = 0.0;
  [[nodiscard]] bool holds() const { return norm_squared <= bound * (1.0 + 1e-12); }
};

// ||J_[0,t) a||^2 against exp(sum of weights before t) ||a||^2.
[[nodiscard]] TruncationBound truncated_J_bound(const FockVector& a, double t);

}  // namespace fockflow

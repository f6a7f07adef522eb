#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "fockflow/types.hpp"

namespace fockflow {

inline constexpr int kMaxGridPoints = 20;

// Discretized base space: M ordered points with times and quadrature weights.
class Grid {
 public:
  Grid(std::vector<double> times, std::vector<double> weights, int noise_dim = 1,
       int system_dim = 1);

  // Points at t_k = k * t_max / M, each with weight t_max / M.
  [[nodiscard]] static Grid uniform(int points, double t_max, int noise_dim = 1,
                                    int system_dim = 1);

  [[nodiscard]] int size() const { return static_cast<int>(times_.size()); }
  [[nodiscard]] double time(int point) const { return times_[point]; }
  [[nodiscard]] double weight(int point) const { return weights_[point]; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] int noise_dim() const { return noise_dim_; }
  [[nodiscard]] int system_dim() const { return system_dim_; }
  [[nodiscard]] double total_weight() const;

  // Same points and weights with a different system dimension.
  [[nodiscard]] Grid with_system_dim(int n) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> weights_;
  int noise_dim_;
  int system_dim_;
};

// A subset of grid points; bit k stands for point k, so ascending bit order is
// ascending time order.
class Chain {
 public:
  constexpr Chain() = default;
  constexpr explicit Chain(std::uint32_t bits) : bits_(bits) {}
  [[nodiscard]] static Chain of(std::initializer_list<int> points);
  [[nodiscard]] static constexpr Chain single(int point) { return Chain(1u << point); }
  [[nodiscard]] static constexpr Chain all(int points) {
    return Chain(points >= 32 ? ~0u : (1u << points) - 1u);
  }

  [[nodiscard]] constexpr std::uint32_t bits() const { return bits_; }
  [[nodiscard]] constexpr int size() const { return std::popcount(bits_); }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] constexpr bool contains(int point) const { return (bits_ >> point) & 1u; }
  [[nodiscard]] constexpr bool disjoint(Chain o) const { return (bits_ & o.bits_) == 0; }
  [[nodiscard]] constexpr bool subset_of(Chain o) const { return (bits_ & ~o.bits_) == 0; }
  [[nodiscard]] std::vector<int> points() const;
  // Points with t(x) < t.
  [[nodiscard]] Chain before(const Grid& grid, double t) const;

  constexpr Chain operator|(Chain o) const { return Chain(bits_ | o.bits_); }
  constexpr Chain operator&(Chain o) const { return Chain(bits_ & o.bits_); }
  constexpr Chain operator-(Chain o) const { return Chain(bits_ & ~o.bits_); }
  friend constexpr auto operator<=>(Chain, Chain) = default;

 private:
  std::uint32_t bits_ = 0;
};

// Calls fn on every subset of `c` (including the empty one and `c` itself).
template <class Fn>
void for_each_subset(Chain c, Fn&& fn) {
  const std::uint32_t full = c.bits();
  std::uint32_t s = 0;
  do {
    fn(Chain(s));
    s = (s - full) & full;
  } while (s != 0);
}

[[nodiscard]] std::vector<Chain> enumerate_chains(const Grid& grid);
[[nodiscard]] double chain_weight(const Grid& grid, Chain c);
// All points before t on the grid.
[[nodiscard]] Chain points_before(const Grid& grid, double t);

// Coordinate layout of the truncated space H (x) F: one block per chain, of
// size n * d^|chain|, in enumerate_chains order. Inside a block the system index
// is most significant, followed by one noise index per point in time order.
class FockSpace {
 public:
  explicit FockSpace(Grid grid);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] const std::vector<Chain>& chains() const { return chains_; }
  [[nodiscard]] Index offset(Chain c) const { return offset_[position_[c.bits()]]; }
  [[nodiscard]] Index block_size(Chain c) const;
  [[nodiscard]] int position(Chain c) const { return position_[c.bits()]; }

 private:
  Grid grid_;
  std::vector<Chain> chains_;
  std::vector<int> position_;
  std::vector<Index> offset_;
  Index dim_ = 0;
};

using SpacePtr = std::shared_ptr<const FockSpace>;
[[nodiscard]] SpacePtr make_space(const Grid& grid);

struct ScaleParams {
  double xi = 1.0;
  explicit ScaleParams(double value);
};

class FockVector {
 public:
  explicit FockVector(SpacePtr space);
  FockVector(SpacePtr space, Vector coeffs);

  [[nodiscard]] static FockVector vacuum(SpacePtr space);

  [[nodiscard]] const FockSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
  [[nodiscard]] const Vector& coeffs() const { return coeffs_; }
  [[nodiscard]] Vector& coeffs() { return coeffs_; }
  [[nodiscard]] Vector block(Chain c) const;
  void set_block(Chain c, const Vector& v);

 private:
  SpacePtr space_;
  Vector coeffs_;
};

[[nodiscard]] double scale_norm(const FockVector& a, ScaleParams xi);

// The family chain -> a(chain + theta), defined on chains disjoint from theta.
// Each block lists the chain's own noise legs first and theta's legs after.
[[nodiscard]] std::map<Chain, Vector> point_derivative(const FockVector& a, Chain theta);

using TripleFunction = std::function<cplx(Chain, Chain, Chain)>;

// (sum over chains of w times the sum over ordered 3-partitions,
//  triple sum over pairwise-disjoint chains with product weights).
[[nodiscard]] std::pair<cplx, cplx> sum_integral_split(const Grid& grid,
                                                       const TripleFunction& f);

}  // namespace fockflow

#pragma once

#include <functional>
#include <vector>

#include "fockflow/chain_space.hpp"
#include "fockflow/legs.hpp"
#include "fockflow/types.hpp"

namespace fockflow {

// Role of a point inside a kernel table.
enum class Slot : int { none = 0, annihilation = 1, time = 2, gauge = 3, creation = 4 };

// Four pairwise-disjoint chains (annihilation, time, gauge, creation).
struct KernelTable {
  Chain annihilation;
  Chain time;
  Chain gauge;
  Chain creation;

  [[nodiscard]] static KernelTable make(Chain annihilation, Chain time, Chain gauge,
                                        Chain creation);
  [[nodiscard]] static KernelTable elementary(int point, Slot slot);

  [[nodiscard]] Chain support() const { return annihilation | time | gauge | creation; }
  [[nodiscard]] Chain output() const { return gauge | creation; }
  [[nodiscard]] Chain input() const { return annihilation | gauge; }
  [[nodiscard]] bool off_diagonal_empty() const {
    return annihilation.empty() && time.empty() && creation.empty();
  }
  [[nodiscard]] bool valid() const;
  [[nodiscard]] Slot slot_of(int point) const;
  [[nodiscard]] Chain chain(Slot s) const;
  // Row legs: gauge then creation; column legs: annihilation then gauge.
  [[nodiscard]] Legs out_legs() const { return concat(gauge, creation); }
  [[nodiscard]] Legs in_legs() const { return concat(annihilation, gauge); }
  // Keeps only the points of `keep`, slot by slot.
  [[nodiscard]] KernelTable restricted(Chain keep) const;

  friend auto operator<=>(const KernelTable&, const KernelTable&) = default;
};

[[nodiscard]] KernelTable operator|(const KernelTable& a, const KernelTable& b);
[[nodiscard]] KernelTable operator-(const KernelTable& a, const KernelTable& b);
[[nodiscard]] bool disjoint(const KernelTable& a, const KernelTable& b);
// Slotwise inclusion.
[[nodiscard]] bool sub_table(const KernelTable& a, const KernelTable& b);

[[nodiscard]] KernelTable table_involution(const KernelTable& t);

// Encodes one slot per point in base 5.
[[nodiscard]] std::size_t table_code(const KernelTable& t, int points);
[[nodiscard]] KernelTable table_from_code(std::size_t code, int points);
[[nodiscard]] std::size_t table_count(int points);

inline constexpr int kMaxKernelPoints = 9;

// Operator-valued function of tables over a grid. Absent tables are zero.
class Kernel {
 public:
  explicit Kernel(Grid grid);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] Index rows(const KernelTable& t) const;
  [[nodiscard]] Index cols(const KernelTable& t) const;

  [[nodiscard]] bool has(const KernelTable& t) const;
  // Stored block, or a zero block of the right shape.
  [[nodiscard]] Matrix at(const KernelTable& t) const;
  void set(const KernelTable& t, Matrix block);
  void add(const KernelTable& t, const Matrix& block);

  // Visits every stored block in table-code order.
  void for_each(const std::function<void(const KernelTable&, const Matrix&)>& fn) const;

  [[nodiscard]] Kernel operator+(const Kernel& o) const;
  [[nodiscard]] Kernel operator-(const Kernel& o) const;
  [[nodiscard]] Kernel operator*(cplx s) const;

 private:
  Grid grid_;
  std::vector<Matrix> blocks_;
};

// Largest blockwise spectral-norm difference over all tables.
[[nodiscard]] double max_difference(const Kernel& a, const Kernel& b);

[[nodiscard]] Kernel unit_kernel(const Grid& grid);
[[nodiscard]] Kernel kernel_adjoint(const Kernel& t);
[[nodiscard]] Kernel kernel_product(const Kernel& s, const Kernel& t);

// Per-point triangular data [[1, ann, time], [0, gauge, cre], [0, 0, 1]]
// with gauge d x d, creation d x 1, annihilation 1 x d and a scalar time entry.
struct PointFactor {
  Matrix annihilation;
  cplx time{0.0, 0.0};
  Matrix gauge;
  Matrix creation;

  [[nodiscard]] static PointFactor unit(int d);
  // Full (d + 2) x (d + 2) triangular matrix.
  [[nodiscard]] Matrix triangular() const;
  [[nodiscard]] static PointFactor from_triangular(const Matrix& m, int d);
  // d = 1 unit factor with the entry of `slot` set to `value`.
  [[nodiscard]] static PointFactor scalar(Slot slot, cplx value);
};

// The product of two per-point triangular matrices, and the g-flipped
// conjugate.
[[nodiscard]] PointFactor operator*(const PointFactor& a, const PointFactor& b);
[[nodiscard]] PointFactor star(const PointFactor& f);

// X (x) f^(x): X on the system, one factor per point from its slot.
[[nodiscard]] Kernel product_kernel(const Matrix& system, const std::vector<PointFactor>& f,
                                    const Grid& grid);
// Identity on the system, the same factor at every point.
[[nodiscard]] Kernel product_kernel(const PointFactor& f, const Grid& grid);

// Nonnegative per-point triangular weights.
struct WeightEntry {
  double annihilation = 0.0;
  double time = 0.0;
  double gauge = 1.0;
  double creation = 0.0;
};
using WeightMatrix = std::vector<WeightEntry>;

[[nodiscard]] Eigen::Matrix3d weight_triangular(const WeightEntry& z);
[[nodiscard]] WeightMatrix weight_star(const WeightMatrix& z);
[[nodiscard]] WeightMatrix weight_star_product(const WeightMatrix& z);

// max over tables of ||T(t)|| / prod of weights; +infinity when a nonzero
// block has a zero weight product.
[[nodiscard]] double relative_bound(const Kernel& t, const WeightMatrix& zeta);

// block (x) I on the points of `extra`, arranged for the table whose gauge
// slot is widened by `extra`.
[[nodiscard]] Matrix gauge_extended_block(const Grid& grid, const KernelTable& tab,
                                          const Matrix& block, Chain extra);

[[nodiscard]] Kernel kernel_from_integrand(const Kernel& l);
[[nodiscard]] Kernel integrand_from_kernel(const Kernel& t);

}  // namespace fockflow

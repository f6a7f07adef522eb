#pragma once

#include <array>
#include <map>
#include <vector>

#include "fockflow/fock_operator.hpp"

namespace fockflow {

// The four point functions D(x) of a single QS integral, for d = 1: each
// entry is a Fock-space matrix per grid point; empty matrices count as zero.
struct IntegrandTable {
  SpacePtr space;
  std::vector<Matrix> annihilation;
  std::vector<Matrix> time;
  std::vector<Matrix> gauge;
  std::vector<Matrix> creation;

  [[nodiscard]] static IntegrandTable zero(SpacePtr space);
  [[nodiscard]] std::vector<Matrix>& slot(Slot s);
  [[nodiscard]] const std::vector<Matrix>& slot(Slot s) const;
};

inline constexpr std::array<Slot, 4> kSlots{Slot::annihilation, Slot::time, Slot::gauge,
                                            Slot::creation};

// One of the four single integrals over the points with t(x) < t.
[[nodiscard]] FockOperator single_integral(Slot slot, double t, const IntegrandTable& d);
// Sum of the four single integrals.
[[nodiscard]] FockOperator single_integrals(double t, const IntegrandTable& d);

// Table-indexed family of Fock-space operators B(table), d = 1. Absent tables
// are zero.
class OperatorKernel {
 public:
  explicit OperatorKernel(SpacePtr space) : space_(std::move(space)) {}

  [[nodiscard]] const FockSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
  [[nodiscard]] bool has(const KernelTable& t) const;
  [[nodiscard]] const Matrix& at(const KernelTable& t) const;
  void set(const KernelTable& t, Matrix m);
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [code, m] : blocks_) fn(table_from_code(code, space_->grid().size()), m);
  }

 private:
  SpacePtr space_;
  std::map<std::size_t, Matrix> blocks_;
};

// Multiple QS integral over the tables with all points before t. Each B(table)
// acts only on chains disjoint from the table's points.
[[nodiscard]] FockOperator multiple_integral(double t, const OperatorKernel& b);

// The four QS derivatives of the multiple integral of b at the point x.
[[nodiscard]] IntegrandTable qs_derivatives(const OperatorKernel& b);

// Function of disjoint pairs of tables (theta, kappa). Blocks use the leg
// layout of the union table.
class BiKernel {
 public:
  explicit BiKernel(Grid grid);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] bool has(const KernelTable& theta, const KernelTable& kappa) const;
  [[nodiscard]] Matrix at(const KernelTable& theta, const KernelTable& kappa) const;
  void set(const KernelTable& theta, const KernelTable& kappa, Matrix block);
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [code, m] : blocks_) {
      const auto [theta, kappa] = decode(code);
      fn(theta, kappa, m);
    }
  }

 private:
  [[nodiscard]] std::size_t encode(const KernelTable& theta, const KernelTable& kappa) const;
  [[nodiscard]] std::pair<KernelTable, KernelTable> decode(std::size_t code) const;

  Grid grid_;
  std::map<std::size_t, Matrix> blocks_;
};

// L(theta, kappa) = L(theta) (x) 1(kappa), where 1 is the identity on purely
// gauge tables and zero elsewhere.
[[nodiscard]] BiKernel pointwise_bikernel(const Kernel& l);

// T(kappa) = sum over sub-tables theta of kappa with points before t of
// L(theta, kappa - theta).
[[nodiscard]] Kernel n_transform(double t, const BiKernel& l);

// The operator family theta -> iota(L(theta, .)). Requires d = 1.
[[nodiscard]] OperatorKernel represent_sections(double t, const BiKernel& l);

// ||multiple_integral(t, iota o L) - iota(n_transform(t, L))||.
[[nodiscard]] double check_intertwining(double t, const BiKernel& l);

// Blockwise largest deviation from T(kappa) = T(kappa before t) (x) 1(kappa after t).
[[nodiscard]] double adaptedness_defect(const Kernel& k, double t);
[[nodiscard]] bool is_adapted(const Kernel& k, double t, double tol = 1e-12);

struct IntegrabilityNorms {
  double gauge = 0.0;         // sup norm
  double creation = 0.0;      // L2
  double annihilation = 0.0;  // L2
  double time = 0.0;          // L1
};

[[nodiscard]] IntegrabilityNorms integrability_norms(const IntegrandTable& d, double t,
                                                     double xi_plus, double xi_minus);

// Scale triples (eta^-, eta^0, eta^+) and (eta_-, eta_0, eta_+).
struct EtaTriple {
  double minus = 1.0;
  double zero = 1.0;
  double plus = 1.0;
};

[[nodiscard]] double multi_norm(const OperatorKernel& b, double t, EtaTriple upper,
                                EtaTriple lower);

// Piecewise constant process: value k on [times[k], times[k + 1]).
struct StepProcess {
  std::vector<double> times;
  std::vector<FockOperator> values;

  [[nodiscard]] const FockOperator& at(double t) const;
};

// || Lambda^t(B . U) - sum_i (Lambda^{t_{i+1}}(B) - Lambda^{t_i}(B)) U_i ||.
// Throws DomainError if some U_i is not adapted at t_i.
[[nodiscard]] double ito_sum_compare(double t, const IntegrandTable& b, const StepProcess& u);

// Largest epsilon admissible in the exponential bound for the scale pair,
// given the sup of the gauge weights; throws if none is positive.
[[nodiscard]] double epsilon_bound(double xi_plus, double xi_minus, double gauge_sup);

// exp{ sum_x w(x) (zeta_time + (zeta_ann^2 + zeta_cre^2) / (2 eps)) } * ||T||(zeta).
[[nodiscard]] double iota_norm_bound(const Kernel& t, const WeightMatrix& zeta, double eps);

}  // namespace fockflow

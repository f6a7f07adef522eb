#pragma once

#include <functional>
#include <vector>

#include "fockflow/integrals.hpp"
#include "fockflow/triangular.hpp"

namespace fockflow {

// kappa -> T(kappa + x in `slot`), on tables not containing x.
[[nodiscard]] Kernel kernel_derivative(const Kernel& t, int point, Slot slot);

// Derivatives of a kernel at one point arranged as a triangular matrix of
// kernels; both corners hold the kernel itself.
struct KernelTriangle {
  Kernel corner;
  Kernel annihilation;
  Kernel time;
  Kernel gauge;
  Kernel creation;
};

[[nodiscard]] KernelTriangle kernel_triangle(const Kernel& t, int point);
[[nodiscard]] KernelTriangle operator*(const KernelTriangle& a, const KernelTriangle& b);
// Entrywise kernel adjoint with annihilation and creation exchanged.
[[nodiscard]] KernelTriangle star(const KernelTriangle& a);

// Largest blockwise gap between the four derivatives of p at the point and the
// entries of m, over tables without the point.
[[nodiscard]] double triangle_gap(const Kernel& p, const KernelTriangle& m, int point);

// Largest blockwise gap between (T^* T)(kappa + x) and the matching entry of
// the triangular product of derivative kernels, over all points, slots and
// tables kappa without x. Requires d = 1.
[[nodiscard]] double kernel_ito_defect(const Kernel& t);

// A time-indexed kernel t -> T^t on a fixed grid.
using KernelProcess = std::function<Kernel(double)>;

// A time strictly between t(x) and the next grid time (or past the end).
[[nodiscard]] double just_after(const Grid& grid, int point);

// The triangular integrands U(x) and G(x) of the process at the point x,
// represented on the Fock space.
struct ItoIntegrand {
  TriangularMatrix u;
  TriangularMatrix g;
};
[[nodiscard]] ItoIntegrand ito_integrand(const KernelProcess& process, const SpacePtr& space,
                                         int point);

// ||U^t* U^t - U^0* U^0 - Lambda^t(G^* G - U^* U)|| in the (xi_plus, xi_minus)
// norm, with ^* the Fock adjoint. Requires d = 1.
[[nodiscard]] double operator_ito_defect(const KernelProcess& process, const Grid& grid, double t,
                                         double xi_plus, double xi_minus);

// ||iota(T^t) - iota(T^0) - Lambda^t(G - U)|| in the (xi_plus, xi_minus)
// norm. Requires d = 1.
[[nodiscard]] double increment_defect(const KernelProcess& process, const Grid& grid, double t,
                                      double xi_plus, double xi_minus);

// The process t -> N_[0,t)(L (x) 1) of a pointwise integrand.
[[nodiscard]] KernelProcess integrand_process(const Kernel& l);

// The process whose kernel at t is the product kernel of X and f on the
// points before t and the unit factor after.
[[nodiscard]] KernelProcess product_process(const Matrix& system, const std::vector<PointFactor>& f,
                                            const Grid& grid);

}  // namespace fockflow

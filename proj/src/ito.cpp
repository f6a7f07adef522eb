#include "fockflow/ito.hpp"

#include <algorithm>
#include <array>

namespace fockflow {

Kernel kernel_derivative(const Kernel& t, int point, Slot slot) {
  const Grid& g = t.grid();
  Kernel out(g);
  const KernelTable x = KernelTable::elementary(point, slot);
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    if (tab.slot_of(point) == slot) out.set(tab - x, b);
  });
  return out;
}

KernelTriangle kernel_triangle(const Kernel& t, int point) {
  return {t, kernel_derivative(t, point, Slot::annihilation),
          kernel_derivative(t, point, Slot::time), kernel_derivative(t, point, Slot::gauge),
          kernel_derivative(t, point, Slot::creation)};
}

KernelTriangle operator*(const KernelTriangle& a, const KernelTriangle& b) {
  return {kernel_product(a.corner, b.corner),
          kernel_product(a.corner, b.annihilation) + kernel_product(a.annihilation, b.gauge),
          kernel_product(a.corner, b.time) + kernel_product(a.annihilation, b.creation) +
              kernel_product(a.time, b.corner),
          kernel_product(a.gauge, b.gauge),
          kernel_product(a.gauge, b.creation) + kernel_product(a.creation, b.corner)};
}

KernelTriangle star(const KernelTriangle& a) {
  return {kernel_adjoint(a.corner), kernel_adjoint(a.creation), kernel_adjoint(a.time),
          kernel_adjoint(a.gauge), kernel_adjoint(a.annihilation)};
}

namespace {

double gap_off_point(const Kernel& a, const Kernel& b, int x) {
  double worst = 0.0;
  const int m = a.grid().size();
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable k = table_from_code(code, m);
    if (k.support().contains(x) || (!a.has(k) && !b.has(k))) continue;
    worst = std::max(worst, spectral_norm(a.at(k) - b.at(k)));
  }
  return worst;
}

}  // namespace

double triangle_gap(const Kernel& p, const KernelTriangle& m, int point) {
  return std::max({gap_off_point(kernel_derivative(p, point, Slot::annihilation), m.annihilation,
                                 point),
                   gap_off_point(kernel_derivative(p, point, Slot::time), m.time, point),
                   gap_off_point(kernel_derivative(p, point, Slot::gauge), m.gauge, point),
                   gap_off_point(kernel_derivative(p, point, Slot::creation), m.creation, point)});
}

double kernel_ito_defect(const Kernel& t) {
  const Grid& g = t.grid();
  if (g.noise_dim() != 1) throw DomainError("kernel Ito identity: only implemented for d = 1");
  const Kernel tt = kernel_product(kernel_adjoint(t), t);
  double worst = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    const KernelTriangle d = kernel_triangle(t, x);
    worst = std::max(worst, triangle_gap(tt, star(d) * d, x));
  }
  return worst;
}

double just_after(const Grid& grid, int point) {
  if (point + 1 < grid.size()) return 0.5 * (grid.time(point) + grid.time(point + 1));
  return grid.time(point) + 1.0;
}

namespace {

// iota of kappa -> T(kappa + x in slot) for all four slots in one pass over T.
// Requires d = 1, where no leg reordering is needed.
std::array<Matrix, 4> represented_derivatives(const Kernel& t, const FockSpace& space, int x) {
  const Grid& g = t.grid();
  std::array<Matrix, 4> out;
  for (Matrix& m : out) m = Matrix::Zero(space.dim(), space.dim());
  const Chain point = Chain::single(x);
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    const Slot s = tab.slot_of(x);
    if (s == Slot::none) return;
    const Chain ann = tab.annihilation - point;
    const double w = chain_weight(g, ann) * chain_weight(g, tab.time - point);
    const Chain rows = tab.output() - point;
    const Chain cols = tab.input() - point;
    out[static_cast<int>(s) - 1].block(space.offset(rows), space.offset(cols), b.rows(), b.cols()) +=
        w * b;
  });
  return out;
}

TriangularMatrix triangle(const Matrix& corner, const std::array<Matrix, 4>& d) {
  TriangularMatrix m(corner.rows(), corner.rows());
  m.set_minus(corner);
  m.set_plus(corner);
  m.set_annihilation(d[0]);
  m.set_time(d[1]);
  m.set_gauge(d[2]);
  m.set_creation(d[3]);
  return m;
}

}  // namespace

ItoIntegrand ito_integrand(const KernelProcess& process, const SpacePtr& space, int point) {
  const Grid& g = space->grid();
  if (g.noise_dim() != 1) throw DomainError("Ito integrand: only implemented for d = 1");
  const Kernel at = process(g.time(point));
  const Kernel after = process(just_after(g, point));
  const Matrix corner = iota(at, space).matrix();
  return {triangle(corner, represented_derivatives(at, *space, point)),
          triangle(corner, represented_derivatives(after, *space, point))};
}

double operator_ito_defect(const KernelProcess& process, const Grid& grid, double t,
                           double xi_plus, double xi_minus) {
  if (grid.noise_dim() != 1) throw DomainError("operator Ito formula: only implemented for d = 1");
  const SpacePtr space = make_space(grid);
  const FockOperator ut = iota(process(t), space);
  const FockOperator u0 = iota(process(0.0), space);
  const FockOperator lhs = fock_adjoint(ut) * ut - fock_adjoint(u0) * u0;
  const Eigen::VectorXd metric = scale_weights(*space, 1.0).array().square();
  IntegrandTable d = IntegrandTable::zero(space);
  for (int x = 0; x < grid.size(); ++x) {
    if (!(grid.time(x) < t)) continue;
    const ItoIntegrand it = ito_integrand(process, space, x);
    const TriangularMatrix m =
        pseudo_conjugate(it.g, metric) * it.g - pseudo_conjugate(it.u, metric) * it.u;
    d.annihilation[x] = m.annihilation();
    d.time[x] = m.time();
    d.gauge[x] = m.gauge();
    d.creation[x] = m.creation();
  }
  return operator_scale_norm(lhs - single_integrals(t, d), xi_plus, xi_minus);
}

KernelProcess integrand_process(const Kernel& l) {
  const BiKernel b = pointwise_bikernel(l);
  return [b](double t) { return n_transform(t, b); };
}

KernelProcess product_process(const Matrix& system, const std::vector<PointFactor>& f,
                              const Grid& grid) {
  return [=](double t) {
    std::vector<PointFactor> cut = f;
    for (int x = 0; x < grid.size(); ++x) {
      if (!(grid.time(x) < t)) cut[x] = PointFactor::unit(grid.noise_dim());
    }
    return product_kernel(system, cut, grid);
  };
}

double increment_defect(const KernelProcess& process, const Grid& grid, double t, double xi_plus,
                        double xi_minus) {
  if (grid.noise_dim() != 1) throw DomainError("increment defect: only implemented for d = 1");
  const SpacePtr space = make_space(grid);
  const FockOperator ut = iota(process(t), space);
  const FockOperator u0 = iota(process(0.0), space);
  IntegrandTable d = IntegrandTable::zero(space);
  for (int x = 0; x < grid.size(); ++x) {
    if (!(grid.time(x) < t)) continue;
    const ItoIntegrand it = ito_integrand(process, space, x);
    const TriangularMatrix inc = it.g - it.u;
    d.annihilation[x] = inc.annihilation();
    d.time[x] = inc.time();
    d.gauge[x] = inc.gauge();
    d.creation[x] = inc.creation();
  }
  return operator_scale_norm(ut - u0 - single_integrals(t, d), xi_plus, xi_minus);
}

}  // namespace fockflow

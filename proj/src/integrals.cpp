#include "fockflow/integrals.hpp"

#include <cmath>

#include "fockflow/legs.hpp"

namespace fockflow {

namespace {

void require_scalar_noise(const Grid& g, const char* what) {
  if (g.noise_dim() != 1) throw DomainError(std::string(what) + ": only implemented for d = 1");
}

// out(s + out_add, s' + in_add) += weight * m(s, s') over chains s, s' that
// avoid `avoid` and the added points.
void accumulate_shifted(Matrix& out, const FockSpace& space, const Matrix& m, Chain out_add,
                        Chain in_add, Chain avoid, double weight) {
  const Index n = space.grid().system_dim();
  for (Chain r : space.chains()) {
    if (!r.disjoint(out_add | avoid)) continue;
    const Index ro = space.offset(r | out_add);
    const Index ri = space.offset(r);
    for (Chain c : space.chains()) {
      if (!c.disjoint(in_add | avoid)) continue;
      out.block(ro, space.offset(c | in_add), n, n) += weight * m.block(ri, space.offset(c), n, n);
    }
  }
}

bool before(const Grid& g, Chain c, double t) { return c.subset_of(points_before(g, t)); }

}  // namespace

IntegrandTable IntegrandTable::zero(SpacePtr space) {
  const auto m = static_cast<std::size_t>(space->grid().size());
  IntegrandTable d{std::move(space), {}, {}, {}, {}};
  for (Slot s : kSlots) d.slot(s).resize(m);
  return d;
}

std::vector<Matrix>& IntegrandTable::slot(Slot s) {
  switch (s) {
    case Slot::annihilation: return annihilation;
    case Slot::time: return time;
    case Slot::gauge: return gauge;
    case Slot::creation: return creation;
    case Slot::none: break;
  }
  throw DomainError("integrand table: no such slot");
}

const std::vector<Matrix>& IntegrandTable::slot(Slot s) const {
  return const_cast<IntegrandTable*>(this)->slot(s);
}

FockOperator single_integral(Slot slot, double t, const IntegrandTable& d) {
  const FockSpace& s = *d.space;
  const Grid& g = s.grid();
  require_scalar_noise(g, "single integral");
  Matrix out = Matrix::Zero(s.dim(), s.dim());
  const auto& f = d.slot(slot);
  for (int x = 0; x < g.size(); ++x) {
    if (!(g.time(x) < t) || static_cast<std::size_t>(x) >= f.size() || f[x].size() == 0) continue;
    if (f[x].rows() != s.dim() || f[x].cols() != s.dim()) {
      throw StructureError("single integral: integrand has the wrong size");
    }
    const Chain p = Chain::single(x);
    switch (slot) {
      case Slot::gauge: accumulate_shifted(out, s, f[x], p, p, {}, 1.0); break;
      case Slot::creation: accumulate_shifted(out, s, f[x], p, {}, {}, 1.0); break;
      case Slot::annihilation: accumulate_shifted(out, s, f[x], {}, p, {}, g.weight(x)); break;
      case Slot::time: out += g.weight(x) * f[x]; break;
      case Slot::none: break;
    }
  }
  return {d.space, std::move(out)};
}

FockOperator single_integrals(double t, const IntegrandTable& d) {
  FockOperator total = FockOperator::zero(d.space);
  for (Slot s : kSlots) total += single_integral(s, t, d);
  return total;
}

bool OperatorKernel::has(const KernelTable& t) const {
  return blocks_.contains(table_code(t, space_->grid().size()));
}

const Matrix& OperatorKernel::at(const KernelTable& t) const {
  return blocks_.at(table_code(t, space_->grid().size()));
}

void OperatorKernel::set(const KernelTable& t, Matrix m) {
  require_scalar_noise(space_->grid(), "operator kernel");
  if (!t.valid()) throw StructureError("operator kernel: table chains overlap");
  if (m.rows() != space_->dim() || m.cols() != space_->dim()) {
    throw StructureError("operator kernel: block has the wrong size");
  }
  blocks_[table_code(t, space_->grid().size())] = std::move(m);
}

namespace {

// Sum over tables theta before t of the shifted B(theta + shift), acting on
// chains that avoid theta and `shift`.
FockOperator integrate_shifted(double t, const OperatorKernel& b, const KernelTable& shift) {
  const FockSpace& s = b.space();
  const Grid& g = s.grid();
  const Chain shift_points = shift.support();
  Matrix out = Matrix::Zero(s.dim(), s.dim());
  b.for_each([&](const KernelTable& full, const Matrix& m) {
    if (!sub_table(shift, full)) return;
    const KernelTable theta = full - shift;
    if (!before(g, theta.support(), t)) return;
    const double w = chain_weight(g, theta.annihilation) * chain_weight(g, theta.time);
    accumulate_shifted(out, s, m, theta.output(), theta.input(), theta.support() | shift_points, w);
  });
  return {b.space_ptr(), std::move(out)};
}

}  // namespace

FockOperator multiple_integral(double t, const OperatorKernel& b) {
  return integrate_shifted(t, b, KernelTable{});
}

IntegrandTable qs_derivatives(const OperatorKernel& b) {
  const Grid& g = b.space().grid();
  IntegrandTable d = IntegrandTable::zero(b.space_ptr());
  for (int x = 0; x < g.size(); ++x) {
    for (Slot s : kSlots) {
      d.slot(s)[x] = integrate_shifted(g.time(x), b, KernelTable::elementary(x, s)).matrix();
    }
  }
  return d;
}

BiKernel::BiKernel(Grid grid) : grid_(std::move(grid)) {
  if (grid_.size() > kMaxKernelPoints) throw DomainError("bi-kernel: too many grid points");
}

std::size_t BiKernel::encode(const KernelTable& theta, const KernelTable& kappa) const {
  if (!theta.valid() || !kappa.valid() || !disjoint(theta, kappa)) {
    throw StructureError("bi-kernel: tables must be valid and disjoint");
  }
  std::size_t code = 0;
  for (int p = grid_.size() - 1; p >= 0; --p) {
    const auto a = static_cast<std::size_t>(theta.slot_of(p));
    const auto b = static_cast<std::size_t>(kappa.slot_of(p));
    code = code * 9 + (a != 0 ? a : (b != 0 ? b + 4 : 0));
  }
  return code;
}

std::pair<KernelTable, KernelTable> BiKernel::decode(std::size_t code) const {
  KernelTable theta, kappa;
  for (int p = 0; p < grid_.size(); ++p) {
    const auto v = static_cast<int>(code % 9);
    code /= 9;
    if (v == 0) continue;
    if (v <= 4) {
      theta = theta | KernelTable::elementary(p, static_cast<Slot>(v));
    } else {
      kappa = kappa | KernelTable::elementary(p, static_cast<Slot>(v - 4));
    }
  }
  return {theta, kappa};
}

bool BiKernel::has(const KernelTable& theta, const KernelTable& kappa) const {
  return blocks_.contains(encode(theta, kappa));
}

Matrix BiKernel::at(const KernelTable& theta, const KernelTable& kappa) const {
  const auto it = blocks_.find(encode(theta, kappa));
  if (it != blocks_.end()) return it->second;
  const Kernel shape(grid_);
  const KernelTable u = theta | kappa;
  return Matrix::Zero(shape.rows(u), shape.cols(u));
}

void BiKernel::set(const KernelTable& theta, const KernelTable& kappa, Matrix block) {
  const std::size_t code = encode(theta, kappa);
  const Kernel shape(grid_);
  const KernelTable u = theta | kappa;
  if (block.rows() != shape.rows(u) || block.cols() != shape.cols(u)) {
    throw StructureError("bi-kernel: block shape does not match the union table");
  }
  blocks_[code] = std::move(block);
}

BiKernel pointwise_bikernel(const Kernel& l) {
  BiKernel out(l.grid());
  const Chain all = Chain::all(l.grid().size());
  l.for_each([&](const KernelTable& theta, const Matrix& b) {
    for_each_subset(all - theta.support(), [&](Chain extra) {
      out.set(theta, KernelTable{{}, {}, extra, {}},
              gauge_extended_block(l.grid(), theta, b, extra));
    });
  });
  return out;
}

Kernel n_transform(double t, const BiKernel& l) {
  Kernel out(l.grid());
  const Chain past = points_before(l.grid(), t);
  l.for_each([&](const KernelTable& theta, const KernelTable& kappa, const Matrix& b) {
    if (theta.support().subset_of(past)) out.add(theta | kappa, b);
  });
  return out;
}

OperatorKernel represent_sections(double t, const BiKernel& l) {
  const Grid& g = l.grid();
  require_scalar_noise(g, "sections");
  const SpacePtr space = make_space(g);
  std::map<std::size_t, Kernel> sections;
  l.for_each([&](const KernelTable& theta, const KernelTable& kappa, const Matrix& b) {
    if (!before(g, theta.support(), t)) return;
    auto it = sections.try_emplace(table_code(theta, g.size()), g).first;
    it->second.set(kappa, b);
  });
  OperatorKernel out(space);
  for (const auto& [code, k] : sections) out.set(table_from_code(code, g.size()), iota(k, space).matrix());
  return out;
}

double check_intertwining(double t, const BiKernel& l) {
  const OperatorKernel b = represent_sections(t, l);
  return fock_norm(multiple_integral(t, b) - iota(n_transform(t, l), b.space_ptr()));
}

double adaptedness_defect(const Kernel& k, double t) {
  const Grid& g = k.grid();
  const Chain past = points_before(g, t);
  double worst = 0.0;
  for (std::size_t code = 0; code < table_count(g.size()); ++code) {
    const KernelTable tab = table_from_code(code, g.size());
    const KernelTable head = tab.restricted(past);
    const KernelTable tail = tab - head;
    const bool extended = tail.off_diagonal_empty() && k.has(head);
    if (!k.has(tab) && !extended) continue;
    Matrix expect = Matrix::Zero(k.rows(tab), k.cols(tab));
    if (extended) expect = gauge_extended_block(g, head, k.at(head), tail.gauge);
    worst = std::max(worst, spectral_norm(k.at(tab) - expect));
  }
  return worst;
}

bool is_adapted(const Kernel& k, double t, double tol) { return adaptedness_defect(k, t) <= tol; }

IntegrabilityNorms integrability_norms(const IntegrandTable& d, double t, double xi_plus,
                                       double xi_minus) {
  const Grid& g = d.space->grid();
  IntegrabilityNorms out;
  for (int x = 0; x < g.size(); ++x) {
    if (!(g.time(x) < t)) continue;
    const auto norm = [&](Slot s) {
      const auto& f = d.slot(s);
      if (static_cast<std::size_t>(x) >= f.size() || f[x].size() == 0) return 0.0;
      return operator_scale_norm(FockOperator(d.space, f[x]), xi_plus, xi_minus);
    };
    const double w = g.weight(x);
    out.gauge = std::max(out.gauge, norm(Slot::gauge));
    out.creation += w * std::pow(norm(Slot::creation), 2);
    out.annihilation += w * std::pow(norm(Slot::annihilation), 2);
    out.time += w * norm(Slot::time);
  }
  out.creation = std::sqrt(out.creation);
  out.annihilation = std::sqrt(out.annihilation);
  return out;
}

double multi_norm(const OperatorKernel& b, double t, EtaTriple upper, EtaTriple lower) {
  for (double v : {upper.minus, upper.zero, upper.plus, lower.minus, lower.zero, lower.plus}) {
    if (!(v > 0.0)) throw DomainError("multi-norm: scale parameters must be positive");
  }
  const Grid& g = b.space().grid();
  const Chain past = points_before(g, t);
  // For each (time, creation, annihilation) triple: the largest gauge-weighted
  // squared norm over gauge chains.
  std::map<std::size_t, double> sup;
  b.for_each([&](const KernelTable& tab, const Matrix& m) {
    if (!tab.support().subset_of(past)) return;
    const double norm = operator_scale_norm(FockOperator(b.space_ptr(), m), upper.plus, lower.minus);
    const double v = std::pow(lower.zero / upper.zero, tab.gauge.size()) * norm * norm;
    const KernelTable key{tab.annihilation, tab.time, {}, tab.creation};
    double& s = sup[table_code(key, g.size())];
    s = std::max(s, v);
  });
  std::map<std::uint32_t, double> inner;
  for (const auto& [code, v] : sup) {
    const KernelTable key = table_from_code(code, g.size());
    inner[key.time.bits()] += chain_weight(g, key.creation) * chain_weight(g, key.annihilation) *
                              std::pow(lower.plus, key.creation.size()) /
                              std::pow(upper.minus, key.annihilation.size()) * v;
  }
  double total = 0.0;
  for (const auto& [bits, v] : inner) total += chain_weight(g, Chain(bits)) * std::sqrt(v);
  return total;
}

const FockOperator& StepProcess::at(double t) const {
  if (times.empty() || times.size() != values.size()) throw DomainError("step process: malformed");
  std::size_t k = 0;
  while (k + 1 < times.size() && times[k + 1] <= t) ++k;
  return values[k];
}

double ito_sum_compare(double t, const IntegrandTable& b, const StepProcess& u) {
  const Grid& g = b.space->grid();
  require_scalar_noise(g, "Ito sums");
  if (u.times.empty() || u.times.front() != 0.0) throw DomainError("step process must start at 0");
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (adaptedness_defect(u.values[i], u.times[i]) > 1e-12) {
      throw DomainError("Ito sums: the step process is not adapted on its intervals");
    }
  }
  IntegrandTable bu = IntegrandTable::zero(b.space);
  for (Slot s : kSlots) {
    for (int x = 0; x < g.size(); ++x) {
      const Matrix& m = b.slot(s)[x];
      if (m.size() != 0) bu.slot(s)[x] = m * u.at(g.time(x)).matrix();
    }
  }
  const FockOperator lhs = single_integrals(t, bu);
  FockOperator rhs = FockOperator::zero(b.space);
  for (std::size_t i = 0; i < u.times.size() && u.times[i] < t; ++i) {
    const double hi = i + 1 < u.times.size() ? std::min(u.times[i + 1], t) : t;
    rhs += (single_integrals(hi, b) - single_integrals(u.times[i], b)) * u.values[i];
  }
  return fock_norm(lhs - rhs);
}

double epsilon_bound(double xi_plus, double xi_minus, double gauge_sup) {
  const double a = xi_plus;
  const double b = 1.0 / xi_minus;
  const double eps = (a + b - std::sqrt((a - b) * (a - b) + 4.0 * gauge_sup * gauge_sup)) / 2.0;
  if (!(eps > 0.0)) {
    throw DomainError("norm bound: the scale ratio does not dominate the gauge weights");
  }
  return eps;
}

double iota_norm_bound(const Kernel& t, const WeightMatrix& zeta, double eps) {
  if (!(eps > 0.0)) throw DomainError("norm bound: epsilon must be positive");
  const Grid& g = t.grid();
  double exponent = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    const WeightEntry& z = zeta[x];
    exponent += g.weight(x) * (z.time + (z.annihilation * z.annihilation +
                                         z.creation * z.creation) / (2.0 * eps));
  }
  return std::exp(exponent) * relative_bound(t, zeta);
}

}  // namespace fockflow

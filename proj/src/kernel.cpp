#include "fockflow/kernel.hpp"

#include <cmath>
#include <limits>

namespace fockflow {

KernelTable KernelTable::make(Chain annihilation, Chain time, Chain gauge, Chain creation) {
  KernelTable t{annihilation, time, gauge, creation};
  if (!t.valid()) throw StructureError("kernel table: chains must be pairwise disjoint");
  return t;
}

KernelTable KernelTable::elementary(int point, Slot slot) {
  KernelTable t;
  const Chain c = Chain::single(point);
  switch (slot) {
    case Slot::annihilation: t.annihilation = c; break;
    case Slot::time: t.time = c; break;
    case Slot::gauge: t.gauge = c; break;
    case Slot::creation: t.creation = c; break;
    case Slot::none: break;
  }
  return t;
}

bool KernelTable::valid() const {
  return annihilation.disjoint(time) && annihilation.disjoint(gauge) &&
         annihilation.disjoint(creation) && time.disjoint(gauge) && time.disjoint(creation) &&
         gauge.disjoint(creation);
}

Slot KernelTable::slot_of(int point) const {
  if (annihilation.contains(point)) return Slot::annihilation;
  if (time.contains(point)) return Slot::time;
  if (gauge.contains(point)) return Slot::gauge;
  if (creation.contains(point)) return Slot::creation;
  return Slot::none;
}

Chain KernelTable::chain(Slot s) const {
  switch (s) {
    case Slot::annihilation: return annihilation;
    case Slot::time: return time;
    case Slot::gauge: return gauge;
    case Slot::creation: return creation;
    case Slot::none: break;
  }
  return {};
}

KernelTable KernelTable::restricted(Chain keep) const {
  return {annihilation & keep, time & keep, gauge & keep, creation & keep};
}

KernelTable operator|(const KernelTable& a, const KernelTable& b) {
  return KernelTable::make(a.annihilation | b.annihilation, a.time | b.time, a.gauge | b.gauge,
                           a.creation | b.creation);
}

KernelTable operator-(const KernelTable& a, const KernelTable& b) {
  return {a.annihilation - b.annihilation, a.time - b.time, a.gauge - b.gauge,
          a.creation - b.creation};
}

bool disjoint(const KernelTable& a, const KernelTable& b) {
  return a.support().disjoint(b.support());
}

bool sub_table(const KernelTable& a, const KernelTable& b) {
  return a.annihilation.subset_of(b.annihilation) && a.time.subset_of(b.time) &&
         a.gauge.subset_of(b.gauge) && a.creation.subset_of(b.creation);
}

KernelTable table_involution(const KernelTable& t) {
  return {t.creation, t.time, t.gauge, t.annihilation};
}

std::size_t table_count(int points) {
  std::size_t c = 1;
  for (int i = 0; i < points; ++i) c *= 5;
  return c;
}

std::size_t table_code(const KernelTable& t, int points) {
  std::size_t code = 0;
  for (int p = points - 1; p >= 0; --p) code = code * 5 + static_cast<std::size_t>(t.slot_of(p));
  return code;
}

KernelTable table_from_code(std::size_t code, int points) {
  KernelTable t;
  for (int p = 0; p < points; ++p) {
    const auto s = static_cast<Slot>(code % 5);
    code /= 5;
    const Chain c = Chain::single(p);
    switch (s) {
      case Slot::annihilation: t.annihilation = t.annihilation | c; break;
      case Slot::time: t.time = t.time | c; break;
      case Slot::gauge: t.gauge = t.gauge | c; break;
      case Slot::creation: t.creation = t.creation | c; break;
      case Slot::none: break;
    }
  }
  return t;
}

Kernel::Kernel(Grid grid) : grid_(std::move(grid)) {
  if (grid_.size() > kMaxKernelPoints) {
    throw DomainError("kernel: at most " + std::to_string(kMaxKernelPoints) + " grid points");
  }
  blocks_.resize(table_count(grid_.size()));
}

Index Kernel::rows(const KernelTable& t) const {
  return grid_.system_dim() * power(grid_.noise_dim(), t.gauge.size() + t.creation.size());
}

Index Kernel::cols(const KernelTable& t) const {
  return grid_.system_dim() * power(grid_.noise_dim(), t.annihilation.size() + t.gauge.size());
}

bool Kernel::has(const KernelTable& t) const {
  return blocks_[table_code(t, grid_.size())].size() != 0;
}

Matrix Kernel::at(const KernelTable& t) const {
  const Matrix& b = blocks_[table_code(t, grid_.size())];
  if (b.size() != 0) return b;
  return Matrix::Zero(rows(t), cols(t));
}

void Kernel::set(const KernelTable& t, Matrix block) {
  if (!t.valid()) throw StructureError("kernel: table chains overlap");
  if (!t.support().subset_of(Chain::all(grid_.size()))) {
    throw StructureError("kernel: table uses points outside the grid");
  }
  if (block.rows() != rows(t) || block.cols() != cols(t)) {
    throw StructureError("kernel: block shape does not match its table");
  }
  blocks_[table_code(t, grid_.size())] = std::move(block);
}

void Kernel::add(const KernelTable& t, const Matrix& block) {
  Matrix& b = blocks_[table_code(t, grid_.size())];
  if (b.size() == 0) {
    set(t, block);
    return;
  }
  if (block.rows() != b.rows() || block.cols() != b.cols()) {
    throw StructureError("kernel: block shape does not match its table");
  }
  b += block;
}

void Kernel::for_each(const std::function<void(const KernelTable&, const Matrix&)>& fn) const {
  for (std::size_t code = 0; code < blocks_.size(); ++code) {
    if (blocks_[code].size() != 0) fn(table_from_code(code, grid_.size()), blocks_[code]);
  }
}

namespace {

void require_same_grid(const Kernel& a, const Kernel& b) {
  if (!(a.grid() == b.grid())) throw StructureError("kernels live on different grids");
}

}  // namespace

Kernel Kernel::operator+(const Kernel& o) const {
  require_same_grid(*this, o);
  Kernel out = *this;
  o.for_each([&](const KernelTable& t, const Matrix& b) { out.add(t, b); });
  return out;
}

Kernel Kernel::operator-(const Kernel& o) const { return *this + o * cplx{-1.0, 0.0}; }

Kernel Kernel::operator*(cplx s) const {
  Kernel out = *this;
  for (Matrix& b : out.blocks_) {
    if (b.size() != 0) b *= s;
  }
  return out;
}

double max_difference(const Kernel& a, const Kernel& b) {
  require_same_grid(a, b);
  double worst = 0.0;
  const int m = a.grid().size();
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable t = table_from_code(code, m);
    if (!a.has(t) && !b.has(t)) continue;
    worst = std::max(worst, spectral_norm(a.at(t) - b.at(t)));
  }
  return worst;
}

Kernel unit_kernel(const Grid& grid) {
  Kernel k(grid);
  for_each_subset(Chain::all(grid.size()), [&](Chain g) {
    const KernelTable t{{}, {}, g, {}};
    k.set(t, identity(k.rows(t)));
  });
  return k;
}

Kernel kernel_adjoint(const Kernel& t) {
  const Grid& g = t.grid();
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  Kernel out(g);
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    const KernelTable star = table_involution(tab);
    // b has rows (gauge, cre) and columns (ann, gauge); its adjoint has rows
    // (ann, gauge) and columns (gauge, cre).
    Matrix adj = b.adjoint();
    adj = reorder_rows(adj, n, d, concat(tab.annihilation, tab.gauge), star.out_legs());
    adj = reorder_cols(adj, n, d, concat(tab.gauge, tab.creation), star.in_legs());
    out.set(star, std::move(adj));
  });
  return out;
}

namespace {

// One way of distributing an output table's points between the two factors.
struct Split {
  KernelTable left;
  KernelTable right;
};

template <class Fn>
void for_each_split(const KernelTable& k, Fn&& fn) {
  std::vector<int> pts;
  std::vector<Slot> slots;
  for (int p : k.support().points()) {
    const Slot s = k.slot_of(p);
    if (s == Slot::gauge) continue;
    pts.push_back(p);
    slots.push_back(s);
  }
  std::vector<int> radix(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) radix[i] = slots[i] == Slot::time ? 3 : 2;
  std::vector<int> choice(pts.size(), 0);
  while (true) {
    Split s;
    s.left.gauge = k.gauge;
    s.right.gauge = k.gauge;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Chain c = Chain::single(pts[i]);
      switch (slots[i]) {
        case Slot::annihilation:
          if (choice[i] == 0) {
            s.right.annihilation = s.right.annihilation | c;
          } else {  // contracted: left annihilates what right leaves in its gauge slot
            s.left.annihilation = s.left.annihilation | c;
            s.right.gauge = s.right.gauge | c;
          }
          break;
        case Slot::creation:
          if (choice[i] == 0) {
            s.left.creation = s.left.creation | c;
          } else {
            s.left.gauge = s.left.gauge | c;
            s.right.creation = s.right.creation | c;
          }
          break;
        case Slot::time:
          if (choice[i] == 0) {
            s.left.time = s.left.time | c;
          } else if (choice[i] == 1) {
            s.right.time = s.right.time | c;
          } else {  // coincidence: right creates, left annihilates
            s.left.annihilation = s.left.annihilation | c;
            s.right.creation = s.right.creation | c;
          }
          break;
        default: break;
      }
    }
    fn(s);
    std::size_t i = 0;
    for (; i < pts.size(); ++i) {
      if (++choice[i] < radix[i]) break;
      choice[i] = 0;
    }
    if (i == pts.size()) return;
  }
}

}  // namespace

Kernel kernel_product(const Kernel& s, const Kernel& t) {
  require_same_grid(s, t);
  const Grid& g = s.grid();
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  const int m = g.size();
  Kernel out(g);
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable k = table_from_code(code, m);
    Matrix acc;
    for_each_split(k, [&](const Split& sp) {
      if (!s.has(sp.left) || !t.has(sp.right)) return;
      Matrix term;
      if (d == 1) {
        term = s.at(sp.left) * t.at(sp.right);
      } else {
        const LegBlock left{s.at(sp.left), sp.left.out_legs(), sp.left.in_legs()};
        const LegBlock right{t.at(sp.right), sp.right.out_legs(), sp.right.in_legs()};
        term = compose(left, right, n, d).arranged(n, d, k.out_legs(), k.in_legs()).m;
      }
      if (acc.size() == 0) {
        acc = std::move(term);
      } else {
        acc += term;
      }
    });
    if (acc.size() != 0) out.set(k, std::move(acc));
  }
  return out;
}

PointFactor PointFactor::unit(int d) {
  return {Matrix::Zero(1, d), cplx{0.0, 0.0}, identity(d), Matrix::Zero(d, 1)};
}

Matrix PointFactor::triangular() const {
  const Index d = gauge.rows();
  Matrix m = Matrix::Zero(d + 2, d + 2);
  m(0, 0) = 1.0;
  m(d + 1, d + 1) = 1.0;
  m.block(0, 1, 1, d) = annihilation;
  m(0, d + 1) = time;
  m.block(1, 1, d, d) = gauge;
  m.block(1, d + 1, d, 1) = creation;
  return m;
}

PointFactor PointFactor::from_triangular(const Matrix& m, int d) {
  if (m.rows() != d + 2 || m.cols() != d + 2) throw StructureError("point factor: bad shape");
  return {m.block(0, 1, 1, d), m(0, d + 1), m.block(1, 1, d, d), m.block(1, d + 1, d, 1)};
}

PointFactor PointFactor::scalar(Slot slot, cplx value) {
  PointFactor f = unit(1);
  switch (slot) {
    case Slot::annihilation: f.annihilation(0, 0) = value; break;
    case Slot::time: f.time = value; break;
    case Slot::gauge: f.gauge(0, 0) = value; break;
    case Slot::creation: f.creation(0, 0) = value; break;
    case Slot::none: break;
  }
  return f;
}

PointFactor operator*(const PointFactor& a, const PointFactor& b) {
  const int d = static_cast<int>(a.gauge.rows());
  return PointFactor::from_triangular(a.triangular() * b.triangular(), d);
}

PointFactor star(const PointFactor& f) {
  return {f.creation.adjoint(), std::conj(f.time), f.gauge.adjoint(), f.annihilation.adjoint()};
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

Kernel product_kernel(const Matrix& system, const std::vector<PointFactor>& f, const Grid& grid) {
  const int m = grid.size();
  const int d = grid.noise_dim();
  if (static_cast<int>(f.size()) != m) throw StructureError("product kernel: one factor per point");
  if (system.rows() != grid.system_dim() || system.cols() != grid.system_dim()) {
    throw StructureError("product kernel: system operator has the wrong size");
  }
  for (const PointFactor& p : f) {
    if (p.gauge.rows() != d || p.gauge.cols() != d || p.annihilation.rows() != 1 ||
        p.annihilation.cols() != d || p.creation.rows() != d || p.creation.cols() != 1) {
      throw StructureError("product kernel: factor shapes do not match the noise dimension");
    }
  }
  Kernel out(grid);
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable t = table_from_code(code, m);
    Matrix block = system;
    bool zero = false;
    cplx scalar{1.0, 0.0};
    for (int p : t.time.points()) scalar *= f[p].time;
    if (scalar == cplx{}) continue;
    for (int p : t.annihilation.points()) {
      if (f[p].annihilation.isZero(0.0)) zero = true;
      block = kron(block, f[p].annihilation);
    }
    for (int p : t.gauge.points()) {
      if (f[p].gauge.isZero(0.0)) zero = true;
      block = kron(block, f[p].gauge);
    }
    for (int p : t.creation.points()) {
      if (f[p].creation.isZero(0.0)) zero = true;
      block = kron(block, f[p].creation);
    }
    if (zero) continue;
    out.set(t, scalar * block);
  }
  return out;
}

Kernel product_kernel(const PointFactor& f, const Grid& grid) {
  return product_kernel(identity(grid.system_dim()),
                        std::vector<PointFactor>(static_cast<std::size_t>(grid.size()), f), grid);
}

Eigen::Matrix3d weight_triangular(const WeightEntry& z) {
  Eigen::Matrix3d m;
  m << 1.0, z.annihilation, z.time, 0.0, z.gauge, z.creation, 0.0, 0.0, 1.0;
  return m;
}

WeightMatrix weight_star(const WeightMatrix& z) {
  WeightMatrix out = z;
  for (WeightEntry& e : out) std::swap(e.annihilation, e.creation);
  return out;
}

WeightMatrix weight_star_product(const WeightMatrix& z) {
  WeightMatrix out;
  out.reserve(z.size());
  const WeightMatrix s = weight_star(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Eigen::Matrix3d p = weight_triangular(s[i]) * weight_triangular(z[i]);
    out.push_back({p(0, 1), p(0, 2), p(1, 1), p(1, 2)});
  }
  return out;
}

double relative_bound(const Kernel& t, const WeightMatrix& zeta) {
  if (static_cast<int>(zeta.size()) != t.grid().size()) {
    throw StructureError("relative bound: one weight entry per point");
  }
  double worst = 0.0;
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    const double norm = spectral_norm(b);
    if (norm == 0.0) return;
    double weight = 1.0;
    for (int p : tab.annihilation.points()) weight *= zeta[p].annihilation;
    for (int p : tab.time.points()) weight *= zeta[p].time;
    for (int p : tab.gauge.points()) weight *= zeta[p].gauge;
    for (int p : tab.creation.points()) weight *= zeta[p].creation;
    worst = weight == 0.0 ? std::numeric_limits<double>::infinity()
                          : std::max(worst, norm / weight);
  });
  return worst;
}

Matrix gauge_extended_block(const Grid& grid, const KernelTable& tab, const Matrix& block,
                            Chain extra) {
  const Index n = grid.system_dim();
  const int d = grid.noise_dim();
  Matrix m = pad_identity(block, d, extra.size());
  if (d > 1) {
    const KernelTable wide{tab.annihilation, tab.time, tab.gauge | extra, tab.creation};
    const Legs extra_legs = legs_of(extra);
    m = reorder_rows(m, n, d, concat(tab.out_legs(), extra_legs), wide.out_legs());
    m = reorder_cols(m, n, d, concat(tab.in_legs(), extra_legs), wide.in_legs());
  }
  return m;
}

namespace {

void add_gauge_extended(Kernel& out, const KernelTable& tab, const Matrix& block, Chain extra,
                        double sign) {
  const KernelTable wide{tab.annihilation, tab.time, tab.gauge | extra, tab.creation};
  out.add(wide, sign * gauge_extended_block(out.grid(), tab, block, extra));
}

}  // namespace

Kernel kernel_from_integrand(const Kernel& l) {
  Kernel out(l.grid());
  const Chain all = Chain::all(l.grid().size());
  l.for_each([&](const KernelTable& tab, const Matrix& b) {
    for_each_subset(all - tab.support(), [&](Chain extra) {
      add_gauge_extended(out, tab, b, extra, 1.0);
    });
  });
  return out;
}

Kernel integrand_from_kernel(const Kernel& t) {
  Kernel out(t.grid());
  const Chain all = Chain::all(t.grid().size());
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    for_each_subset(all - tab.support(), [&](Chain extra) {
      add_gauge_extended(out, tab, b, extra, extra.size() % 2 == 0 ? 1.0 : -1.0);
    });
  });
  return out;
}

}  // namespace fockflow

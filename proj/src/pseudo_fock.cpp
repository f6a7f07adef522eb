#include "fockflow/pseudo_fock.hpp"

#include <cmath>
#include <string>

#include "fockflow/legs.hpp"

namespace fockflow {

namespace {

// Base-4 digit per point: 0 absent, 1 minus, 2 zero, 3 plus.
constexpr int kMinusDigit = 1;
constexpr int kZeroDigit = 2;
constexpr int kPlusDigit = 3;

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw StructureError("pseudo-Fock vectors live on different grids");
}

double triple_weight(const Grid& g, const ChainTriple& t) {
  return chain_weight(g, t.minus) * chain_weight(g, t.zero) * chain_weight(g, t.plus);
}

}  // namespace

PseudoFockVector::PseudoFockVector(Grid grid) : grid_(std::move(grid)) {
  if (grid_.size() > kMaxPseudoFockPoints) {
    throw DomainError("pseudo-Fock space: at most " + std::to_string(kMaxPseudoFockPoints) +
                      " grid points");
  }
  blocks_.resize(std::size_t{1} << (2 * grid_.size()));
  for (std::size_t code = 0; code < blocks_.size(); ++code) {
    blocks_[code] = Vector::Zero(block_size(triple_of(code)));
  }
}

PseudoFockVector PseudoFockVector::vacuum(const Grid& grid) {
  PseudoFockVector v(grid);
  v.blocks_[0](0) = 1.0;
  return v;
}

Index PseudoFockVector::block_size(const ChainTriple& t) const {
  return grid_.system_dim() * power(grid_.noise_dim(), t.zero.size());
}

std::size_t PseudoFockVector::code_of(const ChainTriple& t) const {
  if (!t.valid()) throw StructureError("pseudo-Fock triple: chains overlap");
  if (!t.support().subset_of(Chain::all(grid_.size()))) {
    throw StructureError("pseudo-Fock triple: point outside the grid");
  }
  std::size_t code = 0;
  for (int p = grid_.size() - 1; p >= 0; --p) {
    int digit = 0;
    if (t.minus.contains(p)) digit = kMinusDigit;
    if (t.zero.contains(p)) digit = kZeroDigit;
    if (t.plus.contains(p)) digit = kPlusDigit;
    code = code * 4 + static_cast<std::size_t>(digit);
  }
  return code;
}

ChainTriple PseudoFockVector::triple_of(std::size_t code) const {
  std::uint32_t minus = 0, zero = 0, plus = 0;
  for (int p = 0; p < grid_.size(); ++p, code >>= 2) {
    switch (code & 3u) {
      case kMinusDigit: minus |= 1u << p; break;
      case kZeroDigit: zero |= 1u << p; break;
      case kPlusDigit: plus |= 1u << p; break;
      default: break;
    }
  }
  return {Chain(minus), Chain(zero), Chain(plus)};
}

const Vector& PseudoFockVector::block(const ChainTriple& t) const { return blocks_[code_of(t)]; }
Vector& PseudoFockVector::block(const ChainTriple& t) { return blocks_[code_of(t)]; }

void PseudoFockVector::set_block(const ChainTriple& t, Vector v) {
  if (v.size() != block_size(t)) throw StructureError("pseudo-Fock vector: block size mismatch");
  blocks_[code_of(t)] = std::move(v);
}

PseudoFockVector& PseudoFockVector::operator+=(const PseudoFockVector& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  return *this;
}

PseudoFockVector PseudoFockVector::operator+(const PseudoFockVector& o) const {
  PseudoFockVector out = *this;
  out += o;
  return out;
}

PseudoFockVector PseudoFockVector::operator-(const PseudoFockVector& o) const {
  return *this + o * cplx(-1.0);
}

PseudoFockVector PseudoFockVector::operator*(cplx s) const {
  PseudoFockVector out = *this;
  for (Vector& b : out.blocks_) b *= s;
  return out;
}

cplx pseudo_inner(const PseudoFockVector& a, const PseudoFockVector& b) {
  require_same_grid(a.grid(), b.grid());
  cplx sum = 0.0;
  a.for_each([&](const ChainTriple& t, const Vector& block) {
    sum += triple_weight(a.grid(), t) * block.dot(b.block(t.swapped()));
  });
  return sum;
}

double euclidean_norm(const PseudoFockVector& a) {
  double sum = 0.0;
  a.for_each([&](const ChainTriple& t, const Vector& block) {
    sum += triple_weight(a.grid(), t) * block.squaredNorm();
  });
  return std::sqrt(sum);
}

PseudoFockVector metric_swap(const PseudoFockVector& a) {
  PseudoFockVector out(a.grid());
  out.for_each([&](const ChainTriple& t, Vector& block) { block = a.block(t.swapped()); });
  return out;
}

PseudoFockVector random_pseudo_fock(const Grid& grid, Rng& rng) {
  PseudoFockVector out(grid);
  out.for_each([&](const ChainTriple&, Vector& block) { block = rng.gaussian(block.size(), 1); });
  return out;
}

PseudoFockVector decomposable_action(const Kernel& t, const PseudoFockVector& a) {
  const Grid& g = a.grid();
  require_same_grid(g, t.grid());
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  const int points = g.size();
  PseudoFockVector out(g);
  t.for_each([&](const KernelTable& tab, const Matrix& raw) {
    const Chain middle = tab.input();
    const Chain zero = tab.output();
    Matrix block = reorder_rows(raw, n, d, tab.out_legs(), legs_of(zero));
    block = reorder_cols(block, n, d, tab.in_legs(), legs_of(middle));
    const Chain free = Chain::all(points) - tab.support();
    const Chain carried = tab.time | tab.creation;
    // Points outside the table stay where they are, in the minus or plus leg.
    for_each_subset(free, [&](Chain outer) {
      for_each_subset(outer, [&](Chain minus) {
        const Chain plus = outer - minus;
        const ChainTriple from{minus, middle, plus | carried};
        const ChainTriple to{minus | tab.annihilation | tab.time, zero, plus};
        out.block(to) += block * a.block(from);
      });
    });
  });
  return out;
}

PseudoFockVector embed_J(const FockVector& a, double horizon) {
  const FockSpace& s = a.space();
  const Grid& g = s.grid();
  const Chain allowed = points_before(g, horizon);
  PseudoFockVector out(g);
  for (Chain zero : s.chains()) {
    const Vector v = a.block(zero);
    for_each_subset(allowed - zero, [&](Chain plus) { out.set_block({Chain(), zero, plus}, v); });
  }
  return out;
}

FockVector project_Jstar(const PseudoFockVector& a, const SpacePtr& space) {
  const Grid& g = space->grid();
  require_same_grid(g, a.grid());
  FockVector out(space);
  for (Chain zero : space->chains()) {
    Vector sum = Vector::Zero(space->block_size(zero));
    for_each_subset(Chain::all(g.size()) - zero, [&](Chain minus) {
      sum += chain_weight(g, minus) * a.block({minus, zero, Chain()});
    });
    out.set_block(zero, sum);
  }
  return out;
}

cplx fock_inner(const FockVector& a, const FockVector& b) {
  const FockSpace& s = a.space();
  require_same_grid(s.grid(), b.space().grid());
  cplx sum = 0.0;
  for (Chain c : s.chains()) sum += chain_weight(s.grid(), c) * a.block(c).dot(b.block(c));
  return sum;
}

TruncationBound truncated_J_bound(const FockVector& a, double t) {
  if (!(t >= 0.0)) throw DomainError("truncated J bound: t must be nonnegative");
  const Grid& g = a.space().grid();
  const double norm = euclidean_norm(embed_J(a, t));
  const double fock = std::real(fock_inner(a, a));
  double exponent = 0.0;
  for (int p : points_before(g, t).points()) exponent += g.weight(p);
  return {norm * norm, std::exp(exponent) * fock};
}

}  // namespace fockflow

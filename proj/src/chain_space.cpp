#include "fockflow/chain_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fockflow/legs.hpp"

namespace fockflow {

Grid::Grid(std::vector<double> times, std::vector<double> weights, int noise_dim, int system_dim)
    : times_(std::move(times)),
      weights_(std::move(weights)),
      noise_dim_(noise_dim),
      system_dim_(system_dim) {
  if (times_.size() != weights_.size()) throw DomainError("grid: times and weights differ in length");
  if (times_.size() > static_cast<std::size_t>(kMaxGridPoints)) {
    throw DomainError("grid: at most " + std::to_string(kMaxGridPoints) + " points");
  }
  if (noise_dim_ < 1) throw DomainError("grid: noise dimension must be >= 1");
  if (system_dim_ < 1) throw DomainError("grid: system dimension must be >= 1");
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (!(weights_[k] > 0.0)) throw DomainError("grid: weights must be positive");
    if (k > 0 && !(times_[k] > times_[k - 1])) {
      throw DomainError("grid: times must be strictly increasing");
    }
  }
}

Grid Grid::uniform(int points, double t_max, int noise_dim, int system_dim) {
  if (points < 0) throw DomainError("grid: negative point count");
  if (points > 0 && !(t_max > 0.0)) throw DomainError("grid: t_max must be positive");
  std::vector<double> times(points), weights(points);
  const double dx = points > 0 ? t_max / points : 0.0;
  for (int k = 0; k < points; ++k) {
    times[k] = k * dx;
    weights[k] = dx;
  }
  return Grid(std::move(times), std::move(weights), noise_dim, system_dim);
}

double Grid::total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

Grid Grid::with_system_dim(int n) const { return Grid(times_, weights_, noise_dim_, n); }

Chain Chain::of(std::initializer_list<int> points) {
  std::uint32_t bits = 0;
  for (int p : points) bits |= 1u << p;
  return Chain(bits);
}

std::vector<int> Chain::points() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

Chain Chain::before(const Grid& grid, double t) const { return *this & points_before(grid, t); }

Chain points_before(const Grid& grid, double t) {
  std::uint32_t bits = 0;
  for (int k = 0; k < grid.size(); ++k) {
    if (grid.time(k) < t) bits |= 1u << k;
  }
  return Chain(bits);
}

std::vector<Chain> enumerate_chains(const Grid& grid) {
  const int m = grid.size();
  std::vector<Chain> out;
  out.reserve(std::size_t{1} << m);
  for (std::uint32_t b = 0; b < (1u << m); ++b) out.emplace_back(b);
  std::sort(out.begin(), out.end(), [](Chain a, Chain b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto pa = a.points();
    const auto pb = b.points();
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  return out;
}

double chain_weight(const Grid& grid, Chain c) {
  double w = 1.0;
  for (int p : c.points()) w *= grid.weight(p);
  return w;
}

FockSpace::FockSpace(Grid grid) : grid_(std::move(grid)), chains_(enumerate_chains(grid_)) {
  position_.assign(chains_.size(), 0);
  offset_.resize(chains_.size());
  Index running = 0;
  for (std::size_t i = 0; i < chains_.size(); ++i) {
    position_[chains_[i].bits()] = static_cast<int>(i);
    offset_[i] = running;
    running += block_size(chains_[i]);
  }
  dim_ = running;
}

Index FockSpace::block_size(Chain c) const {
  return grid_.system_dim() * power(grid_.noise_dim(), c.size());
}

SpacePtr make_space(const Grid& grid) { return std::make_shared<const FockSpace>(grid); }

ScaleParams::ScaleParams(double value) : xi(value) {
  if (!(value > 0.0)) throw DomainError("scale parameter must be positive");
}

FockVector::FockVector(SpacePtr space) : space_(std::move(space)) {
  coeffs_ = Vector::Zero(space_->dim());
}

FockVector::FockVector(SpacePtr space, Vector coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->dim()) throw StructureError("fock vector: dimension mismatch");
}

FockVector FockVector::vacuum(SpacePtr space) {
  FockVector v(std::move(space));
  v.coeffs_(0) = 1.0;
  return v;
}

Vector FockVector::block(Chain c) const {
  return coeffs_.segment(space_->offset(c), space_->block_size(c));
}

void FockVector::set_block(Chain c, const Vector& v) {
  if (v.size() != space_->block_size(c)) throw StructureError("fock vector: block size mismatch");
  coeffs_.segment(space_->offset(c), v.size()) = v;
}

double scale_norm(const FockVector& a, ScaleParams xi) {
  const FockSpace& s = a.space();
  double sum = 0.0;
  for (Chain c : s.chains()) {
    sum += std::pow(xi.xi, c.size()) * chain_weight(s.grid(), c) * a.block(c).squaredNorm();
  }
  return std::sqrt(sum);
}

std::map<Chain, Vector> point_derivative(const FockVector& a, Chain theta) {
  const FockSpace& s = a.space();
  const int n = s.grid().system_dim();
  const int d = s.grid().noise_dim();
  std::map<Chain, Vector> out;
  for (Chain c : s.chains()) {
    if (!c.disjoint(theta)) continue;
    const Vector merged = a.block(c | theta);
    Matrix as_col = merged;
    out.emplace(c, reorder_rows(as_col, n, d, legs_of(c | theta), concat(c, theta)).col(0));
  }
  return out;
}

std::pair<cplx, cplx> sum_integral_split(const Grid& grid, const TripleFunction& f) {
  const Chain all = Chain::all(grid.size());
  cplx lhs{0.0, 0.0};
  for_each_subset(all, [&](Chain theta) {
    cplx inner{0.0, 0.0};
    for_each_subset(theta, [&](Chain minus) {
      for_each_subset(theta - minus, [&](Chain zero) {
        inner += f(minus, zero, theta - minus - zero);
      });
    });
    lhs += chain_weight(grid, theta) * inner;
  });
  cplx rhs{0.0, 0.0};
  for_each_subset(all, [&](Chain a) {
    for_each_subset(all, [&](Chain b) {
      if (!a.disjoint(b)) return;
      for_each_subset(all, [&](Chain c) {
        if (!c.disjoint(a | b)) return;
        rhs += chain_weight(grid, a) * chain_weight(grid, b) * chain_weight(grid, c) * f(a, b, c);
      });
    });
  });
  return {lhs, rhs};
}

}  // namespace fockflow

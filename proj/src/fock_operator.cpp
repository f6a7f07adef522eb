#include "fockflow/fock_operator.hpp"

#include <cmath>

#include "fockflow/legs.hpp"

namespace fockflow {

namespace {

void require_same_space(const FockOperator& a, const FockOperator& b) {
  if (!(a.grid() == b.grid())) throw StructureError("operators act on different Fock spaces");
}

}  // namespace

FockOperator::FockOperator(SpacePtr space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
  if (m_.rows() != space_->dim() || m_.cols() != space_->dim()) {
    throw StructureError("Fock operator: matrix size does not match the space");
  }
}

FockOperator FockOperator::identity(SpacePtr space) {
  const Index n = space->dim();
  return {std::move(space), Matrix::Identity(n, n)};
}

FockOperator FockOperator::zero(SpacePtr space) {
  const Index n = space->dim();
  return {std::move(space), Matrix::Zero(n, n)};
}

FockVector FockOperator::apply(const FockVector& a) const {
  if (!(a.space().grid() == grid())) throw StructureError("vector lives on another Fock space");
  return FockVector(space_, m_ * a.coeffs());
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same_space(*this, o);
  m_ += o.m_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same_space(*this, o);
  m_ -= o.m_;
  return *this;
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  FockOperator out = *this;
  out += o;
  return out;
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
  FockOperator out = *this;
  out -= o;
  return out;
}

FockOperator FockOperator::operator*(const FockOperator& o) const {
  require_same_space(*this, o);
  return {space_, m_ * o.m_};
}

FockOperator FockOperator::operator*(cplx s) const { return {space_, m_ * s}; }

Eigen::VectorXd scale_weights(const FockSpace& space, double xi) {
  Eigen::VectorXd w(space.dim());
  for (Chain c : space.chains()) {
    const double v = std::sqrt(std::pow(xi, c.size()) * chain_weight(space.grid(), c));
    w.segment(space.offset(c), space.block_size(c)).setConstant(v);
  }
  return w;
}

FockOperator fock_adjoint(const FockOperator& u) {
  const Eigen::VectorXd w = scale_weights(u.space(), 1.0).array().square();
  Matrix adj = u.matrix().adjoint();
  adj = w.cwiseInverse().asDiagonal() * adj * w.asDiagonal();
  return {u.space_ptr(), std::move(adj)};
}

double operator_scale_norm(const FockOperator& u, double xi_plus, double xi_minus) {
  if (!(xi_plus > 0.0) || !(xi_minus > 0.0)) throw DomainError("scale norm: scales must be positive");
  const Eigen::VectorXd out = scale_weights(u.space(), xi_minus);
  const Eigen::VectorXd in = scale_weights(u.space(), xi_plus);
  const Matrix scaled = out.asDiagonal() * u.matrix() * in.cwiseInverse().asDiagonal();
  return spectral_norm(scaled);
}

double fock_norm(const FockOperator& u) { return operator_scale_norm(u, 1.0, 1.0); }

FockOperator iota(const Kernel& t, const SpacePtr& space) {
  const Grid& g = t.grid();
  if (!(space->grid() == g)) throw StructureError("iota: kernel and space grids differ");
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  Matrix m = Matrix::Zero(space->dim(), space->dim());
  t.for_each([&](const KernelTable& tab, const Matrix& b) {
    const Chain out = tab.output();
    const Chain in = tab.input();
    const double w = chain_weight(g, tab.annihilation) * chain_weight(g, tab.time);
    Matrix block = reorder_rows(b, n, d, tab.out_legs(), legs_of(out));
    block = reorder_cols(block, n, d, tab.in_legs(), legs_of(in));
    m.block(space->offset(out), space->offset(in), block.rows(), block.cols()) += w * block;
  });
  return {space, std::move(m)};
}

FockOperator iota(const Kernel& t) { return iota(t, make_space(t.grid())); }

double iota_adjoint_check(const Kernel& t) {
  const SpacePtr s = make_space(t.grid());
  return fock_norm(fock_adjoint(iota(t, s)) - iota(kernel_adjoint(t), s));
}

double adaptedness_defect(const FockOperator& u, double t) {
  const FockSpace& s = u.space();
  const Grid& g = s.grid();
  if (g.noise_dim() != 1) throw DomainError("adaptedness: only implemented for d = 1");
  const Index n = g.system_dim();
  const Chain past = points_before(g, t);
  double worst = 0.0;
  for (Chain r : s.chains()) {
    for (Chain c : s.chains()) {
      const Matrix block = u.matrix().block(s.offset(r), s.offset(c), n, n);
      Matrix expect = Matrix::Zero(n, n);
      if ((r - past) == (c - past)) {
        expect = u.matrix().block(s.offset(r & past), s.offset(c & past), n, n);
      }
      worst = std::max(worst, (block - expect).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace fockflow

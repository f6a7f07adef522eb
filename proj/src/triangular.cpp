#include "fockflow/triangular.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace fockflow {

namespace {

void require_lower_zero(const Matrix& m, Index outer, Index inner) {
  const double tol = 0.0;
  const bool ok = m.block(outer, 0, inner + outer, outer).isZero(tol) &&
                  m.block(outer + inner, outer, outer, inner).isZero(tol);
  if (!ok) throw StructureError("triangular matrix: nonzero block below the diagonal");
}

void require_compatible(const TriangularMatrix& a, const TriangularMatrix& b) {
  if (a.outer() != b.outer() || a.inner() != b.inner()) {
    throw StructureError("triangular matrices of different block sizes");
  }
}

}  // namespace

TriangularMatrix::TriangularMatrix(Index outer, Index inner)
    : outer_(outer), inner_(inner), full_(Matrix::Zero(2 * outer + inner, 2 * outer + inner)) {}

TriangularMatrix::TriangularMatrix(Index outer, Index inner, Matrix full)
    : outer_(outer), inner_(inner), full_(std::move(full)) {
  if (full_.rows() != 2 * outer + inner || full_.cols() != 2 * outer + inner) {
    throw StructureError("triangular matrix: wrong overall size");
  }
  require_lower_zero(full_, outer_, inner_);
}

TriangularMatrix TriangularMatrix::identity(Index outer, Index inner) {
  return {outer, inner, Matrix::Identity(2 * outer + inner, 2 * outer + inner)};
}

TriangularMatrix TriangularMatrix::from_blocks(const Matrix& minus, const Matrix& annihilation,
                                               const Matrix& time, const Matrix& gauge,
                                               const Matrix& creation, const Matrix& plus) {
  const Index outer = minus.rows();
  const Index inner = gauge.rows();
  const bool ok = minus.cols() == outer && plus.rows() == outer && plus.cols() == outer &&
                  time.rows() == outer && time.cols() == outer && gauge.cols() == inner &&
                  annihilation.rows() == outer && annihilation.cols() == inner &&
                  creation.rows() == inner && creation.cols() == outer;
  if (!ok) throw StructureError("triangular matrix: block shapes disagree");
  TriangularMatrix m(outer, inner);
  m.set_minus(minus);
  m.set_annihilation(annihilation);
  m.set_time(time);
  m.set_gauge(gauge);
  m.set_creation(creation);
  m.set_plus(plus);
  return m;
}

TriangularMatrix TriangularMatrix::operator*(const TriangularMatrix& o) const {
  require_compatible(*this, o);
  const Matrix am = minus(), aa = annihilation(), at = time(), ag = gauge(), ac = creation(),
               ap = plus();
  const Matrix bm = o.minus(), ba = o.annihilation(), bt = o.time(), bg = o.gauge(),
               bc = o.creation(), bp = o.plus();
  return from_blocks(am * bm, am * ba + aa * bg, am * bt + aa * bc + at * bp, ag * bg,
                     ag * bc + ac * bp, ap * bp);
}

TriangularMatrix TriangularMatrix::operator+(const TriangularMatrix& o) const {
  require_compatible(*this, o);
  TriangularMatrix out = *this;
  out.full_ += o.full_;
  return out;
}

TriangularMatrix TriangularMatrix::operator-(const TriangularMatrix& o) const {
  require_compatible(*this, o);
  TriangularMatrix out = *this;
  out.full_ -= o.full_;
  return out;
}

TriangularMatrix TriangularMatrix::operator*(cplx s) const {
  TriangularMatrix out = *this;
  out.full_ *= s;
  return out;
}

Matrix flip_metric(Index outer, Index inner) {
  Matrix g = Matrix::Zero(2 * outer + inner, 2 * outer + inner);
  g.block(0, outer + inner, outer, outer).setIdentity();
  g.block(outer, outer, inner, inner).setIdentity();
  g.block(outer + inner, 0, outer, outer).setIdentity();
  return g;
}

namespace {

// g M^* g with M^* built blockwise from `adj`.
template <class Adjoint>
TriangularMatrix flipped(const TriangularMatrix& m, Adjoint adj) {
  return TriangularMatrix::from_blocks(adj(m.plus()), adj(m.creation()), adj(m.time()),
                                       adj(m.gauge()), adj(m.annihilation()), adj(m.minus()));
}

}  // namespace

TriangularMatrix pseudo_conjugate(const TriangularMatrix& m) {
  return flipped(m, [](const Matrix& b) -> Matrix { return b.adjoint(); });
}

TriangularMatrix pseudo_conjugate(const TriangularMatrix& m, const Eigen::VectorXd& metric) {
  if (m.inner() != m.outer() || metric.size() != m.outer()) {
    throw StructureError("pseudo-conjugation: metric does not match the block sizes");
  }
  const Eigen::VectorXd inv = metric.cwiseInverse();
  return flipped(m, [&](const Matrix& b) -> Matrix {
    return inv.asDiagonal() * b.adjoint() * metric.asDiagonal();
  });
}

TriangularMatrix triangular_power(const TriangularMatrix& h, int k) {
  if (k < 0) throw DomainError("triangular power: negative exponent");
  if (!h.minus().isZero(0.0) || !h.plus().isZero(0.0)) {
    throw DomainError("triangular power: corner blocks must vanish");
  }
  TriangularMatrix out = TriangularMatrix::identity(h.outer(), h.inner());
  for (int i = 0; i < k; ++i) out = out * h;
  return out;
}

TriangularMatrix ito_product_derivative(const TriangularMatrix& u, const TriangularMatrix& g) {
  return pseudo_conjugate(g) * g - pseudo_conjugate(u) * u;
}

double max_difference(const TriangularMatrix& a, const TriangularMatrix& b) {
  require_compatible(a, b);
  const TriangularMatrix d = a - b;
  double worst = 0.0;
  for (const Matrix& m : {d.minus(), d.annihilation(), d.time(), d.gauge(), d.creation(), d.plus()}) {
    worst = std::max(worst, spectral_norm(m));
  }
  return worst;
}

TriangularMatrix evaluate(const OrderedPolynomial& f, const std::vector<TriangularMatrix>& z) {
  if (z.empty()) throw DomainError("functional calculus: no arguments");
  const Index outer = z.front().outer(), inner = z.front().inner();
  TriangularMatrix out(outer, inner);
  for (const Monomial& mono : f) {
    TriangularMatrix term = TriangularMatrix::identity(outer, inner);
    for (int i : mono.factors) {
      if (i < 0 || i >= static_cast<int>(z.size())) {
        throw DomainError("functional calculus: monomial refers to a missing argument");
      }
      term = term * z[i];
    }
    out = out + term * mono.coefficient;
  }
  return out;
}

namespace {

std::vector<TriangularMatrix> shifted(const std::vector<TriangularMatrix>& x,
                                      const std::vector<TriangularMatrix>& a) {
  if (x.size() != a.size()) throw DomainError("functional calculus: X and A lists differ in length");
  std::vector<TriangularMatrix> z;
  z.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z.push_back(x[i] + a[i]);
  return z;
}

TriangularMatrix exp_of_sum(const std::vector<TriangularMatrix>& z) {
  TriangularMatrix sum(z.front().outer(), z.front().inner());
  for (const TriangularMatrix& m : z) sum = sum + m;
  return {sum.outer(), sum.inner(), sum.full().exp()};
}

}  // namespace

CalculusPair functional_calculus(const OrderedPolynomial& f, const std::vector<TriangularMatrix>& x,
                                 const std::vector<TriangularMatrix>& a) {
  return {evaluate(f, x), evaluate(f, shifted(x, a))};
}

CalculusPair exponential_calculus(const std::vector<TriangularMatrix>& x,
                                  const std::vector<TriangularMatrix>& a) {
  if (x.empty()) throw DomainError("functional calculus: no arguments");
  const std::vector<TriangularMatrix> z = shifted(x, a);
  std::vector<TriangularMatrix> all = x;
  all.insert(all.end(), z.begin(), z.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const Matrix c = all[i].full() * all[j].full() - all[j].full() * all[i].full();
      if (spectral_norm(c) > kCommutatorTolerance) {
        throw DomainError(
            "exponential calculus requires mutually commuting X and X + A; a commutator has norm " +
            std::to_string(spectral_norm(c)));
      }
    }
  }
  return {exp_of_sum(x), exp_of_sum(z)};
}

}  // namespace fockflow

#include "fockflow/gates.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "fockflow/legs.hpp"
#include "fockflow/random.hpp"

namespace fockflow {

LinearMap dense_map(Matrix m) {
  const Index dim = m.rows();
  auto shared = std::make_shared<const Matrix>(std::move(m));
  return {dim, [shared](const Vector& v) -> Vector { return *shared * v; },
          [shared](const Vector& v) -> Vector { return shared->adjoint() * v; }};
}

LinearMap identity_map(Index dim) {
  const auto same = [](const Vector& v) -> Vector { return v; };
  return {dim, same, same};
}

LinearMap compose(LinearMap a, LinearMap b) {
  if (a.dim != b.dim) throw StructureError("compose: dimensions differ");
  return {a.dim, [a, b](const Vector& v) -> Vector { return a.apply(b.apply(v)); },
          [a, b](const Vector& v) -> Vector { return b.apply_adjoint(a.apply_adjoint(v)); }};
}

LinearMap difference(LinearMap a, LinearMap b) {
  if (a.dim != b.dim) throw StructureError("difference: dimensions differ");
  return {a.dim, [a, b](const Vector& v) -> Vector { return a.apply(v) - b.apply(v); },
          [a, b](const Vector& v) -> Vector { return a.apply_adjoint(v) - b.apply_adjoint(v); }};
}

double largest_singular_value(const LinearMap& a, int max_steps, double tol) {
  const Index n = a.dim;
  if (n == 0) return 0.0;
  const int steps = static_cast<int>(std::min<Index>(max_steps, n));
  Rng rng(0x5eed);
  std::vector<Vector> basis;
  basis.push_back(rng.vector(n));
  std::vector<double> alpha, beta;
  double previous = -1.0;
  double theta = 0.0;
  for (int j = 0; j < steps; ++j) {
    Vector w = a.apply_adjoint(a.apply(basis[j]));
    alpha.push_back(basis[j].dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : basis) w -= q.dot(w) * q;
    }
    const double b = w.norm();
    const auto k = static_cast<Index>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    theta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tri, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .maxCoeff();
    if (b <= 1e-14 * std::max(1.0, std::abs(theta))) break;
    if (std::abs(theta - previous) <= tol * std::max(std::abs(theta), 1e-300)) break;
    previous = theta;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return std::sqrt(std::max(theta, 0.0));
}

LinearMap fock_adjoint(const LinearMap& a, const SpacePtr& space) {
  const Eigen::VectorXd w = scale_weights(*space, 1.0).array().square();
  const Eigen::VectorXd inv = w.cwiseInverse();
  return {a.dim,
          [a, w, inv](const Vector& v) -> Vector {
            return inv.asDiagonal() * a.apply_adjoint(w.asDiagonal() * v);
          },
          [a, w, inv](const Vector& v) -> Vector {
            return w.asDiagonal() * a.apply(inv.asDiagonal() * v);
          }};
}

double operator_scale_norm(const LinearMap& a, const SpacePtr& space, double xi_plus,
                           double xi_minus) {
  if (!(xi_plus > 0.0) || !(xi_minus > 0.0)) throw DomainError("scale norm: scales must be positive");
  const Eigen::VectorXd out = scale_weights(*space, xi_minus);
  const Eigen::VectorXd in = scale_weights(*space, xi_plus).cwiseInverse();
  const LinearMap scaled{a.dim,
                         [&](const Vector& v) -> Vector {
                           return out.asDiagonal() * a.apply(in.asDiagonal() * v);
                         },
                         [&](const Vector& v) -> Vector {
                           return in.asDiagonal() * a.apply_adjoint(out.asDiagonal() * v);
                         }};
  return largest_singular_value(scaled);
}

Matrix point_gate(const TriangularMatrix& f, double w) {
  const Index n = f.outer();
  const Index m = f.inner();
  Matrix g(n + m, n + m);
  g.topLeftCorner(n, n) = f.minus() + w * f.time();
  g.topRightCorner(n, m) = w * f.annihilation();
  g.bottomLeftCorner(m, n) = f.creation();
  g.bottomRightCorner(m, m) = f.gauge();
  return g;
}

Matrix point_gate(const PointFactor& f, double w) {
  const Index d = f.gauge.rows();
  Matrix g(1 + d, 1 + d);
  g(0, 0) = 1.0 + w * f.time;
  g.topRightCorner(1, d) = w * f.annihilation;
  g.bottomLeftCorner(d, 1) = f.creation;
  g.bottomRightCorner(d, d) = f.gauge;
  return g;
}

GateProduct::GateProduct(SpacePtr space, Matrix initial, std::vector<Matrix> gates)
    : space_(std::move(space)), initial_(std::move(initial)), gates_(std::move(gates)) {
  const Grid& g = space_->grid();
  const Index n = g.system_dim();
  const Index size = n * (1 + g.noise_dim());
  if (initial_.rows() != n || initial_.cols() != n) {
    throw StructureError("gate product: initial operator must act on the system");
  }
  if (static_cast<int>(gates_.size()) != g.size()) {
    throw StructureError("gate product: need one gate per grid point");
  }
  for (const Matrix& m : gates_) {
    if (m.rows() != size || m.cols() != size) throw StructureError("gate product: bad gate shape");
  }

  auto slices = std::make_shared<std::vector<Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>>>();
  const Index d = g.noise_dim();
  for (int point = 0; point < g.size(); ++point) {
    const Chain x = Chain::single(point);
    const Chain lower = Chain(x.bits() - 1u);
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> idx(size, space_->dim() / (1 + d) / n);
    Index col = 0;
    for (Chain c : space_->chains()) {
      if (c.contains(point)) continue;
      const int below = (c & lower).size();
      const Index hi = power(static_cast<int>(d), below);
      const Index lo = power(static_cast<int>(d), c.size() - below);
      const Index off_c = space_->offset(c);
      const Index off_cx = space_->offset(c | x);
      for (Index r = 0; r < hi; ++r) {
        for (Index l = 0; l < lo; ++l, ++col) {
          for (Index s = 0; s < n; ++s) {
            idx(s, col) = off_c + (s * hi + r) * lo + l;
            for (Index e = 0; e < d; ++e) {
              idx(n + s * d + e, col) = off_cx + ((s * hi + r) * d + e) * lo + l;
            }
          }
        }
      }
    }
    slices->push_back(std::move(idx));
  }
  slices_ = std::move(slices);
}

void GateProduct::apply_system(Vector& v, const Matrix& op) const {
  const Index n = op.rows();
  for (Chain c : space_->chains()) {
    const Index rest = space_->block_size(c) / n;
    // Column-major view: entry (r, s) is coordinate s * rest + r.
    Eigen::Map<Matrix> block(v.data() + space_->offset(c), rest, n);
    block = block * op.transpose();
  }
}

void GateProduct::apply_gate(Vector& v, int point, const Matrix& gate) const {
  const auto& idx = (*slices_)[point];
  Matrix gathered(idx.rows(), idx.cols());
  for (Index k = 0; k < idx.cols(); ++k) {
    for (Index r = 0; r < idx.rows(); ++r) gathered(r, k) = v(idx(r, k));
  }
  gathered = gate * gathered;
  for (Index k = 0; k < idx.cols(); ++k) {
    for (Index r = 0; r < idx.rows(); ++r) v(idx(r, k)) = gathered(r, k);
  }
}

Vector GateProduct::apply(const Vector& v) const {
  if (v.size() != space_->dim()) throw StructureError("gate product: vector has the wrong size");
  Vector out = v;
  apply_system(out, initial_);
  for (int x = 0; x < static_cast<int>(gates_.size()); ++x) apply_gate(out, x, gates_[x]);
  return out;
}

Vector GateProduct::apply_adjoint(const Vector& v) const {
  if (v.size() != space_->dim()) throw StructureError("gate product: vector has the wrong size");
  Vector out = v;
  for (int x = static_cast<int>(gates_.size()) - 1; x >= 0; --x) {
    apply_gate(out, x, gates_[x].adjoint());
  }
  apply_system(out, initial_.adjoint());
  return out;
}

LinearMap GateProduct::map() const {
  auto self = std::make_shared<const GateProduct>(*this);
  return {space_->dim(), [self](const Vector& v) { return self->apply(v); },
          [self](const Vector& v) { return self->apply_adjoint(v); }};
}

FockOperator GateProduct::dense() const {
  const Index dim = space_->dim();
  Matrix m(dim, dim);
  for (Index j = 0; j < dim; ++j) m.col(j) = apply(Vector::Unit(dim, j));
  return {space_, std::move(m)};
}

GateProduct product_gates(const Matrix& system, const std::vector<PointFactor>& f,
                          const SpacePtr& space) {
  const Grid& g = space->grid();
  if (static_cast<int>(f.size()) != g.size()) {
    throw StructureError("product gates: need one factor per grid point");
  }
  const Index n = g.system_dim();
  const Index d = g.noise_dim();
  const Matrix id = identity(n);
  std::vector<Matrix> gates;
  gates.reserve(f.size());
  for (int x = 0; x < g.size(); ++x) {
    const Matrix p = point_gate(f[x], g.weight(x));
    if (p.rows() != 1 + d) throw StructureError("product gates: factor has the wrong noise dimension");
    Matrix lifted(n * (1 + d), n * (1 + d));
    lifted.topLeftCorner(n, n) = p(0, 0) * id;
    lifted.topRightCorner(n, n * d) = Eigen::kroneckerProduct(id, p.topRightCorner(1, d));
    lifted.bottomLeftCorner(n * d, n) = Eigen::kroneckerProduct(id, p.bottomLeftCorner(d, 1));
    lifted.bottomRightCorner(n * d, n * d) = Eigen::kroneckerProduct(id, p.bottomRightCorner(d, d));
    gates.push_back(std::move(lifted));
  }
  return {space, system, std::move(gates)};
}

double product_multiplicativity_defect(const Matrix& x, const std::vector<PointFactor>& f,
                                       const Matrix& y, const std::vector<PointFactor>& g,
                                       const Grid& grid, double xi_plus, double xi_minus) {
  if (f.size() != g.size() || static_cast<int>(f.size()) != grid.size()) {
    throw StructureError("multiplicativity: need one factor per grid point");
  }
  // Product-kernel gates act trivially on the system and commute across
  // points, so the defect is ||XY|| times that of the noise parts alone.
  const SpacePtr noise = make_space(grid.with_system_dim(1));
  std::vector<Matrix> product, composed;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double w = grid.weight(static_cast<int>(k));
    product.push_back(point_gate(f[k] * g[k], w));
    composed.push_back(point_gate(f[k], w) * point_gate(g[k], w));
  }
  const Matrix one = identity(1);
  const LinearMap gap = difference(GateProduct(noise, one, std::move(product)).map(),
                                   GateProduct(noise, one, std::move(composed)).map());
  return spectral_norm(x * y) * operator_scale_norm(gap, noise, xi_plus, xi_minus);
}

}  // namespace fockflow

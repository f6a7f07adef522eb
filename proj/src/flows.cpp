#include "fockflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fockflow/legs.hpp"
#include "fockflow/random.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace fockflow {

MatrixMap::MatrixMap(Index in_rows, Index in_cols, Index out_rows, Index out_cols, Matrix action)
    : in_rows_(in_rows),
      in_cols_(in_cols),
      out_rows_(out_rows),
      out_cols_(out_cols),
      action_(std::move(action)) {
  if (action_.rows() != out_rows_ * out_cols_ || action_.cols() != in_rows_ * in_cols_) {
    throw StructureError("matrix map: action does not match the declared shapes");
  }
}

MatrixMap MatrixMap::from_function(Index in_rows, Index in_cols,
                                   const std::function<Matrix(const Matrix&)>& fn) {
  Matrix action;
  Index out_rows = 0, out_cols = 0;
  for (Index j = 0; j < in_cols; ++j) {
    for (Index i = 0; i < in_rows; ++i) {
      Matrix unit = Matrix::Zero(in_rows, in_cols);
      unit(i, j) = 1.0;
      const Matrix image = fn(unit);
      if (action.size() == 0) {
        out_rows = image.rows();
        out_cols = image.cols();
        action = Matrix::Zero(out_rows * out_cols, in_rows * in_cols);
      } else if (image.rows() != out_rows || image.cols() != out_cols) {
        throw StructureError("matrix map: images of different shapes");
      }
      action.col(i + j * in_rows) = image.reshaped();
    }
  }
  return {in_rows, in_cols, out_rows, out_cols, std::move(action)};
}

MatrixMap MatrixMap::identity(Index n) {
  return {n, n, n, n, Matrix::Identity(n * n, n * n)};
}

MatrixMap MatrixMap::ampliation(Index n, Index k) {
  return from_function(n, n, [k](const Matrix& a) {
    return Matrix(Eigen::kroneckerProduct(a, Matrix::Identity(k, k)));
  });
}

MatrixMap MatrixMap::zero(Index in_rows, Index in_cols, Index out_rows, Index out_cols) {
  return {in_rows, in_cols, out_rows, out_cols,
          Matrix::Zero(out_rows * out_cols, in_rows * in_cols)};
}

Matrix MatrixMap::operator()(const Matrix& a) const {
  if (a.rows() != in_rows_ || a.cols() != in_cols_) {
    throw StructureError("matrix map: argument has the wrong shape");
  }
  const Vector image = action_ * a.reshaped();
  return image.reshaped(out_rows_, out_cols_);
}

Matrix MatrixMap::apply_passive(const Matrix& b, Index row_legs, Index col_legs) const {
  if (b.rows() != in_rows_ * row_legs || b.cols() != in_cols_ * col_legs) {
    throw StructureError("matrix map: operator does not factor over the passive legs");
  }
  Matrix inputs(in_rows_ * in_cols_, row_legs * col_legs);
  for (Index c = 0; c < col_legs; ++c) {
    for (Index r = 0; r < row_legs; ++r) {
      auto column = inputs.col(r + c * row_legs);
      for (Index j = 0; j < in_cols_; ++j) {
        for (Index i = 0; i < in_rows_; ++i) column(i + j * in_rows_) = b(i * row_legs + r, j * col_legs + c);
      }
    }
  }
  const Matrix images = action_ * inputs;
  Matrix out(out_rows_ * row_legs, out_cols_ * col_legs);
  for (Index c = 0; c < col_legs; ++c) {
    for (Index r = 0; r < row_legs; ++r) {
      const auto column = images.col(r + c * row_legs);
      for (Index j = 0; j < out_cols_; ++j) {
        for (Index i = 0; i < out_rows_; ++i) out(i * row_legs + r, j * col_legs + c) = column(i + j * out_rows_);
      }
    }
  }
  return out;
}

MatrixMap MatrixMap::operator+(const MatrixMap& o) const {
  if (o.in_rows_ != in_rows_ || o.in_cols_ != in_cols_ || o.out_rows_ != out_rows_ ||
      o.out_cols_ != out_cols_) {
    throw StructureError("matrix map: sum of maps with different shapes");
  }
  return {in_rows_, in_cols_, out_rows_, out_cols_, action_ + o.action_};
}

MatrixMap MatrixMap::operator-(const MatrixMap& o) const {
  return *this + MatrixMap(o.in_rows_, o.in_cols_, o.out_rows_, o.out_cols_, -o.action_);
}

MatrixMap MatrixMap::after(const MatrixMap& o) const {
  if (o.out_rows_ != in_rows_ || o.out_cols_ != in_cols_) {
    throw StructureError("matrix map: composition of incompatible maps");
  }
  return {o.in_rows_, o.in_cols_, out_rows_, out_cols_, action_ * o.action_};
}

double map_norm(const MatrixMap& m) {
  if (m.in_rows() * m.in_cols() == 1) return spectral_norm(m(Matrix::Ones(1, 1)));
  if (m.action().isZero(0.0)) return 0.0;
  Rng rng(0x6d61);
  double best = 0.0;
  constexpr int kStarts = 8;
  for (int start = 0; start < kStarts; ++start) {
    Matrix a = rng.matrix(m.in_rows(), m.in_cols());
    double value = spectral_norm(m(a));
    for (int step = 0; step < 200; ++step) {
      const Eigen::JacobiSVD<Matrix> top(m(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Matrix direction = top.matrixU().col(0) * top.matrixV().col(0).adjoint();
      const Vector pulled = m.action().adjoint() * direction.reshaped();
      const Matrix gradient = pulled.reshaped(m.in_rows(), m.in_cols());
      const Eigen::JacobiSVD<Matrix> polar(gradient, Eigen::ComputeThinU | Eigen::ComputeThinV);
      a = polar.matrixU() * polar.matrixV().adjoint();
      const double next = spectral_norm(m(a));
      const bool stalled = next <= value * (1.0 + 1e-14);
      value = std::max(value, next);
      if (stalled) break;
    }
    best = std::max(best, value);
  }
  return best;
}

PointStructure PointStructure::trivial(Index n, int d) {
  return {MatrixMap::zero(n, n, n, n * d), MatrixMap::zero(n, n, n, n),
          MatrixMap::ampliation(n, d), MatrixMap::zero(n, n, n * d, n)};
}

const MatrixMap& PointStructure::component(Slot s) const {
  switch (s) {
    case Slot::annihilation: return annihilation;
    case Slot::time: return time;
    case Slot::gauge: return gauge;
    case Slot::creation: return creation;
    default: break;
  }
  throw DomainError("point structure: no component for an absent point");
}

PointStructure PointStructure::lambda() const {
  const Index n = time.in_rows();
  const Index d = gauge.out_rows() / n;
  return {annihilation, time, gauge - MatrixMap::ampliation(n, d), creation};
}

TriangularMatrix PointStructure::operator()(const Matrix& a) const {
  return TriangularMatrix::from_blocks(a, annihilation(a), time(a), gauge(a), creation(a), a);
}

namespace {

void require_shape(const MatrixMap& m, Index in, Index out_rows, Index out_cols,
                   const char* what) {
  if (m.in_rows() != in || m.in_cols() != in || m.out_rows() != out_rows ||
      m.out_cols() != out_cols) {
    throw StructureError(std::string("structure map: ") + what + " component has the wrong shape");
  }
}

}  // namespace

StructureMap::StructureMap(Grid grid, std::vector<PointStructure> points)
    : grid_(std::move(grid)), points_(std::move(points)) {
  if (static_cast<int>(points_.size()) != grid_.size()) {
    throw StructureError("structure map: one point structure per grid point required");
  }
  const Index n = grid_.system_dim();
  const Index nd = n * grid_.noise_dim();
  for (const PointStructure& p : points_) {
    require_shape(p.annihilation, n, n, nd, "annihilation");
    require_shape(p.time, n, n, n, "time");
    require_shape(p.gauge, n, nd, nd, "gauge");
    require_shape(p.creation, n, nd, n, "creation");
  }
}

StructureMap StructureMap::trivial(const Grid& grid) {
  return {grid, std::vector<PointStructure>(
                    grid.size(), PointStructure::trivial(grid.system_dim(), grid.noise_dim()))};
}

StructureMap StructureMap::from_function(
    const Grid& grid, const std::function<TriangularMatrix(int, const Matrix&)>& fn) {
  const Index n = grid.system_dim();
  std::vector<PointStructure> points;
  for (int x = 0; x < grid.size(); ++x) {
    for (const Matrix& unit : matrix_units(n)) {
      const TriangularMatrix image = fn(x, unit);
      if (image.outer() != n || image.inner() != n * grid.noise_dim()) {
        throw StructureError("structure map: image has the wrong block sizes");
      }
      if (spectral_norm(image.minus() - unit) > 1e-12 || spectral_norm(image.plus() - unit) > 1e-12) {
        throw StructureError("structure map: corner components must reproduce the argument");
      }
    }
    auto part = [&](auto block) {
      return MatrixMap::from_function(n, n, [&](const Matrix& a) { return block(fn(x, a)); });
    };
    points.push_back({part([](const TriangularMatrix& m) { return m.annihilation(); }),
                      part([](const TriangularMatrix& m) { return m.time(); }),
                      part([](const TriangularMatrix& m) { return m.gauge(); }),
                      part([](const TriangularMatrix& m) { return m.creation(); })});
  }
  return {grid, std::move(points)};
}

StructureMap spatial_structure_map(const GeneratorField& f) {
  const Grid& g = f.grid();
  const Index n = g.system_dim();
  const int d = g.noise_dim();
  return StructureMap::from_function(g, [&](int x, const Matrix& a) {
    const Matrix zero_ann = Matrix::Zero(n, n * d);
    const TriangularMatrix lifted = TriangularMatrix::from_blocks(
        a, zero_ann, Matrix::Zero(n, n), Eigen::kroneckerProduct(a, Matrix::Identity(d, d)),
        zero_ann.transpose(), a);
    return pseudo_conjugate(f.at(x)) * lifted * f.at(x);
  });
}

std::vector<Matrix> matrix_units(Index n) {
  std::vector<Matrix> out;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      out.push_back(std::move(e));
    }
  }
  return out;
}

double multiplicativity_defect(const StructureMap& phi, const std::vector<Matrix>& generators) {
  const Grid& g = phi.grid();
  const Index n = g.system_dim();
  std::vector<Matrix> words = generators;
  for (const Matrix& a : generators) {
    for (const Matrix& b : generators) words.push_back(a * b);
  }
  const TriangularMatrix unit = TriangularMatrix::identity(n, n * g.noise_dim());
  double worst = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    const PointStructure& p = phi.at(x);
    worst = std::max(worst, spectral_norm((p(identity(n)) - unit).full()));
    std::vector<TriangularMatrix> images;
    for (const Matrix& w : words) images.push_back(p(w));
    for (std::size_t i = 0; i < words.size(); ++i) {
      const TriangularMatrix conj = pseudo_conjugate(images[i]);
      for (std::size_t j = 0; j < words.size(); ++j) {
        const TriangularMatrix lhs = p(words[i].adjoint() * words[j]);
        worst = std::max(worst, spectral_norm((lhs - conj * images[j]).full()));
      }
    }
  }
  return worst;
}

double hermiticity_defect(const StructureMap& phi) {
  double worst = 0.0;
  for (int x = 0; x < phi.grid().size(); ++x) {
    for (const Matrix& a : matrix_units(phi.grid().system_dim())) {
      const TriangularMatrix lhs = phi(x, a.adjoint());
      worst = std::max(worst, spectral_norm((lhs - pseudo_conjugate(phi(x, a))).full()));
    }
  }
  return worst;
}

namespace {

// Depth-first nesting over the grid points, innermost point first. Each point
// is either absent from the table or contributes its slot component.
class NestingBuilder {
 public:
  NestingBuilder(const Grid& grid, std::vector<const PointStructure*> maps,
                 const MatrixMap& tau0, std::vector<int> order)
      : grid_(grid), maps_(std::move(maps)), tau0_(tau0), order_(std::move(order)), out_(grid) {
    const Index n = grid.system_dim();
    if (tau0.in_rows() != n || tau0.in_cols() != n || tau0.out_rows() != n ||
        tau0.out_cols() != n) {
      throw StructureError("flow: initial map must act on system operators");
    }
  }

  Kernel build(const Matrix& a) {
    if (a.rows() != grid_.system_dim() || a.cols() != grid_.system_dim()) {
      throw StructureError("flow: operator has the wrong size");
    }
    visit(0, a, KernelTable{}, {}, {});
    return std::move(out_);
  }

 private:
  void visit(std::size_t depth, const Matrix& b, const KernelTable& tab, const Legs& rows,
             const Legs& cols) {
    const int d = grid_.noise_dim();
    if (depth == order_.size()) {
      const Index n = grid_.system_dim();
      Matrix block = tau0_.apply_passive(b, b.rows() / n, b.cols() / n);
      block = reorder_rows(block, n, d, rows, tab.out_legs());
      block = reorder_cols(block, n, d, cols, tab.in_legs());
      out_.set(tab, std::move(block));
      return;
    }
    const int x = order_[depth];
    visit(depth + 1, b, tab, rows, cols);
    const PointStructure* p = maps_[x];
    if (p == nullptr) return;
    for (Slot s : kSlots) {
      const MatrixMap& m = p->component(s);
      if (m.action().isZero(0.0)) continue;
      const Index row_legs = b.rows() / m.in_rows();
      const Index col_legs = b.cols() / m.in_cols();
      const Matrix next = m.apply_passive(b, row_legs, col_legs);
      const bool out_leg = s == Slot::gauge || s == Slot::creation;
      const bool in_leg = s == Slot::gauge || s == Slot::annihilation;
      visit(depth + 1, next, tab | KernelTable::elementary(x, s),
            out_leg ? concat(Legs{x}, rows) : rows, in_leg ? concat(Legs{x}, cols) : cols);
    }
  }

  const Grid& grid_;
  std::vector<const PointStructure*> maps_;
  const MatrixMap& tau0_;
  std::vector<int> order_;
  Kernel out_;
};

std::vector<int> nesting_order(int points, NestingOrder order) {
  std::vector<int> out(points);
  for (int i = 0; i < points; ++i) out[i] = i;
  // The innermost point is visited first.
  if (order == NestingOrder::earliest_outermost) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

Kernel flow_kernel(double t, const StructureMap& phi, const MatrixMap& tau0, const Matrix& a,
                   NestingOrder order) {
  const Grid& g = phi.grid();
  const PointStructure trivial = PointStructure::trivial(g.system_dim(), g.noise_dim());
  std::vector<const PointStructure*> maps;
  for (int x = 0; x < g.size(); ++x) maps.push_back(g.time(x) < t ? &phi.at(x) : &trivial);
  return NestingBuilder(g, std::move(maps), tau0, nesting_order(g.size(), order)).build(a);
}

Kernel flow_integrand(double t, const StructureMap& phi, const MatrixMap& tau0, const Matrix& a,
                      NestingOrder order) {
  const Grid& g = phi.grid();
  std::vector<PointStructure> lambdas;
  lambdas.reserve(g.size());
  for (int x = 0; x < g.size(); ++x) lambdas.push_back(phi.at(x).lambda());
  std::vector<const PointStructure*> maps;
  for (int x = 0; x < g.size(); ++x) maps.push_back(g.time(x) < t ? &lambdas[x] : nullptr);
  return NestingBuilder(g, std::move(maps), tau0, nesting_order(g.size(), order)).build(a);
}

Kernel flow_kernel(double t, const Grid& grid, const ContextualStructure& phi,
                   const MatrixMap& tau0, const Matrix& a) {
  const Index n = grid.system_dim();
  const int d = grid.noise_dim();
  const int m = grid.size();
  const PointStructure trivial = PointStructure::trivial(n, d);
  Kernel out(grid);
  for (std::size_t code = 0; code < table_count(m); ++code) {
    const KernelTable tab = table_from_code(code, m);
    const std::vector<int> points = tab.support().points();
    Matrix b = a;
    Legs rows, cols;
    bool vanishes = false;
    for (auto it = points.rbegin(); it != points.rend() && !vanishes; ++it) {
      const int x = *it;
      const Slot s = tab.slot_of(x);
      const PointStructure p =
          grid.time(x) < t ? phi(x, tab.restricted(Chain::all(x))) : trivial;
      const MatrixMap& map = p.component(s);
      if (map.action().isZero(0.0)) {
        vanishes = true;
        continue;
      }
      b = map.apply_passive(b, b.rows() / map.in_rows(), b.cols() / map.in_cols());
      if (s == Slot::gauge || s == Slot::creation) rows.insert(rows.begin(), x);
      if (s == Slot::gauge || s == Slot::annihilation) cols.insert(cols.begin(), x);
    }
    if (vanishes) continue;
    b = tau0.apply_passive(b, b.rows() / n, b.cols() / n);
    b = reorder_rows(b, n, d, rows, tab.out_legs());
    b = reorder_cols(b, n, d, cols, tab.in_legs());
    out.set(tab, std::move(b));
  }
  return out;
}

FockOperator flow(double t, const StructureMap& phi, const MatrixMap& tau0, const Matrix& a,
                  NestingOrder order) {
  return iota(flow_kernel(t, phi, tau0, a, order), make_space(phi.grid()));
}

KernelProcess flow_process(const StructureMap& phi, const MatrixMap& tau0, const Matrix& a) {
  return [phi, tau0, a](double t) { return flow_kernel(t, phi, tau0, a); };
}

double homomorphism_defect(double t, const StructureMap& phi, const MatrixMap& tau0,
                           const Matrix& a, double xi_plus, double xi_minus) {
  const SpacePtr space = make_space(phi.grid());
  const FockOperator ja = iota(flow_kernel(t, phi, tau0, a), space);
  const FockOperator jaa = iota(flow_kernel(t, phi, tau0, a.adjoint() * a), space);
  return operator_scale_norm(jaa - fock_adjoint(ja) * ja, xi_plus, xi_minus);
}

double langevin_defect(double t, const StructureMap& phi, const MatrixMap& tau0, const Matrix& a,
                       double xi_plus, double xi_minus) {
  return increment_defect(flow_process(phi, tau0, a), phi.grid(), t, xi_plus, xi_minus);
}

double flow_injectivity(double t, const StructureMap& phi, const MatrixMap& tau0) {
  const SpacePtr space = make_space(phi.grid());
  const std::vector<Matrix> units = matrix_units(phi.grid().system_dim());
  Matrix images(space->dim() * space->dim(), static_cast<Index>(units.size()));
  for (std::size_t k = 0; k < units.size(); ++k) {
    images.col(static_cast<Index>(k)) =
        iota(flow_kernel(t, phi, tau0, units[k]), space).matrix().reshaped();
  }
  const Eigen::JacobiSVD<Matrix> svd(images);
  return svd.singularValues().minCoeff();
}

TransformDefect transformed_process_equation_check(double t, const GeneratorField& f,
                                                   const KernelProcess& b, double xi_plus,
                                                   double xi_minus) {
  const Grid& g = f.grid();
  if (g.noise_dim() != 1) throw DomainError("transformed process: only implemented for d = 1");
  const Index n = g.system_dim();
  const KernelProcess u = evolution_process(f, identity(n));
  TransformDefect out;

  const Kernel ut = u(t);
  const Kernel bt = b(t);
  const Kernel product = kernel_product(kernel_adjoint(ut), kernel_product(bt, ut));
  for (int x = 0; x < g.size(); ++x) {
    const KernelTriangle du = kernel_triangle(ut, x);
    out.kernel = std::max(out.kernel,
                          triangle_gap(product, star(du) * (kernel_triangle(bt, x) * du), x));
  }

  const SpacePtr space = make_space(g);
  auto transformed = [&](double s) {
    const FockOperator us = iota(u(s), space);
    return fock_adjoint(us) * iota(b(s), space) * us;
  };
  const Eigen::VectorXd metric = scale_weights(*space, 1.0).array().square();
  IntegrandTable d = IntegrandTable::zero(space);
  for (int x = 0; x < g.size(); ++x) {
    if (!(g.time(x) < t)) continue;
    const ItoIntegrand iu = ito_integrand(u, space, x);
    const ItoIntegrand ib = ito_integrand(b, space, x);
    const TriangularMatrix m = pseudo_conjugate(iu.g, metric) * ib.g * iu.g -
                               pseudo_conjugate(iu.u, metric) * ib.u * iu.u;
    d.annihilation[x] = m.annihilation();
    d.time[x] = m.time();
    d.gauge[x] = m.gauge();
    d.creation[x] = m.creation();
  }
  out.operator_level = operator_scale_norm(
      transformed(t) - transformed(0.0) - single_integrals(t, d), xi_plus, xi_minus);
  return out;
}

NormBound flow_norm_bound_check(const StructureMap& phi, const MatrixMap& tau0, const Matrix& a,
                                double t, double xi_plus, double xi_minus, double epsilon) {
  const double a_norm = spectral_norm(a);
  if (a_norm > 1.0 + 1e-12) throw DomainError("flow norm bound: requires ||A|| <= 1");
  const Grid& g = phi.grid();
  double gauge_sup = 0.0;
  double exponent = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    if (!(g.time(x) < t)) continue;
    const PointStructure& p = phi.at(x);
    gauge_sup = std::max(gauge_sup, map_norm(p.gauge));
    const double ann = map_norm(p.annihilation);
    const double cre = map_norm(p.creation);
    exponent += g.weight(x) * (map_norm(p.time) + (ann * ann + cre * cre) / (2.0 * epsilon));
  }
  const double admissible = epsilon_bound(xi_plus, xi_minus, gauge_sup);
  if (!(epsilon > 0.0) || epsilon > admissible) {
    throw DomainError("flow norm bound: epsilon must lie in (0, " + std::to_string(admissible) +
                      "]");
  }
  const double norm = operator_scale_norm(flow(t, phi, tau0, a), xi_plus, xi_minus);
  return {norm, map_norm(tau0) * a_norm * std::exp(exponent)};
}

}  // namespace fockflow

#include "fockflow/sampling.hpp"

#include <cmath>

namespace fockflow {

Kernel random_kernel(const Grid& grid, Rng& rng, double density) {
  Kernel k(grid);
  for (std::size_t code = 0; code < table_count(grid.size()); ++code) {
    if (density < 1.0 && rng.uniform(0.0, 1.0) >= density) continue;
    const KernelTable t = table_from_code(code, grid.size());
    k.set(t, rng.matrix(k.rows(t), k.cols(t)));
  }
  return k;
}

PointFactor random_point_factor(int d, Rng& rng, double scale) {
  return {scale * rng.matrix(1, d), scale * rng.complex_normal(), scale * rng.matrix(d, d),
          scale * rng.matrix(d, 1)};
}

std::vector<PointFactor> random_point_factors(const Grid& grid, Rng& rng, double scale) {
  std::vector<PointFactor> f;
  f.reserve(grid.size());
  for (int p = 0; p < grid.size(); ++p) f.push_back(random_point_factor(grid.noise_dim(), rng, scale));
  return f;
}

std::vector<PointFactor> smooth_point_factors(const Grid& grid, Rng& rng, double scale) {
  if (grid.noise_dim() != 1) throw DomainError("smooth factors: only implemented for d = 1");
  const PointFactor base = random_point_factor(1, rng, scale);
  const PointFactor drift = random_point_factor(1, rng, scale);
  const double phase = rng.uniform(0.0, 6.0);
  std::vector<PointFactor> f;
  f.reserve(grid.size());
  for (int x = 0; x < grid.size(); ++x) {
    const double s = grid.time(x);
    PointFactor p;
    p.annihilation = base.annihilation + s * drift.annihilation;
    p.time = base.time + s * drift.time;
    p.gauge = Matrix::Constant(1, 1, 0.9 * std::exp(cplx(0.0, phase + s)));
    p.creation = base.creation + s * drift.creation;
    f.push_back(std::move(p));
  }
  return f;
}

TriangularMatrix random_pseudo_hermitian(Index system_dim, int noise_dim, Rng& rng, double scale) {
  const Index n = system_dim;
  const Index m = n * noise_dim;
  const Matrix coupling = scale * rng.matrix(m, n);
  const Matrix zero = Matrix::Zero(n, n);
  return TriangularMatrix::from_blocks(zero, coupling.adjoint(), scale * rng.hermitian(n),
                                       scale * rng.hermitian(m), coupling, zero);
}

}  // namespace fockflow

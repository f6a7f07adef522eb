#pragma once

#include <vector>

#include "fockflow/kernel.hpp"
#include "fockflow/random.hpp"
#include "fockflow/triangular.hpp"

namespace fockflow {

// Each table receives a unit-norm Gaussian block with probability `density`.
[[nodiscard]] Kernel random_kernel(const Grid& grid, Rng& rng, double density = 1.0);

// Random per-point factors with unit-norm blocks scaled by `scale`.
[[nodiscard]] PointFactor random_point_factor(int d, Rng& rng, double scale = 1.0);
[[nodiscard]] std::vector<PointFactor> random_point_factors(const Grid& grid, Rng& rng,
                                                            double scale = 1.0);

// d = 1 factors whose annihilation, time and creation entries drift linearly
// in time from a random base, with a gauge of modulus 0.9 rotating in time.
[[nodiscard]] std::vector<PointFactor> smooth_point_factors(const Grid& grid, Rng& rng,
                                                            double scale);

// Zero-corner triangular H with H00, H+- Hermitian and H0- = (H+0)^*, each
// block of spectral norm `scale`.
[[nodiscard]] TriangularMatrix random_pseudo_hermitian(Index system_dim, int noise_dim, Rng& rng,
                                                       double scale = 1.0);

}  // namespace fockflow

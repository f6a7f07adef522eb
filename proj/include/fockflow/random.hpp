#pragma once

#include <cstdint>
#include <random>

#include "fockflow/types.hpp"

namespace fockflow {

// Seeded source of standard complex Gaussian data.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] double normal() { return normal_(engine_); }
  [[nodiscard]] double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  [[nodiscard]] int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  // Real and imaginary parts each of variance 1/2.
  [[nodiscard]] cplx complex_normal() {
    constexpr double s = 0.70710678118654752440;
    return {s * normal(), s * normal()};
  }
  [[nodiscard]] Matrix gaussian(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
    }
    return m;
  }
  // Gaussian entries rescaled to unit spectral norm.
  [[nodiscard]] Matrix matrix(Index rows, Index cols) {
    Matrix m = gaussian(rows, cols);
    const double s = spectral_norm(m);
    return s > 0.0 ? Matrix(m / s) : m;
  }
  [[nodiscard]] Vector vector(Index size) {
    Vector v = gaussian(size, 1).col(0);
    return v / v.norm();
  }
  [[nodiscard]] Matrix hermitian(Index n) {
    const Matrix g = gaussian(n, n);
    const Matrix h = (g + g.adjoint()) / 2.0;
    return h / spectral_norm(h);
  }
  [[nodiscard]] Matrix unitary(Index n) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
  }
  [[nodiscard]] std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fockflow

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fockflow {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr cplx I_unit{0.0, 1.0};

// Raised when block shapes disagree with the table they are attached to.
class StructureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when an argument lies outside the domain an operation is defined on.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Largest singular value; zero for empty matrices.
[[nodiscard]] double spectral_norm(const Matrix& m);

[[nodiscard]] inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

}  // namespace fockflow

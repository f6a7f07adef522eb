#include "fockflow/types.hpp"

#include <Eigen/SVD>

namespace fockflow {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  if (m.rows() <= 16 && m.cols() <= 16) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  }
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

}  // namespace fockflow

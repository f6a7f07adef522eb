#include "fockflow/convergence.hpp"

#include <cmath>

#include "fockflow/types.hpp"

namespace fockflow {

double convergence_order(std::span<const double> sizes, std::span<const double> errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) {
    throw DomainError("convergence order: need at least two matching samples");
  }
  const auto n = static_cast<double>(sizes.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) {
      throw DomainError("convergence order: sizes and errors must be positive");
    }
    const double x = -std::log(sizes[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("convergence order: all grid sizes are equal");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace fockflow

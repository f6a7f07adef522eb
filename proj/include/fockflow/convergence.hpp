#pragma once

#include <span>

namespace fockflow {

// Least-squares slope of log(error) against log(1/M): the observed order of
// convergence in the grid spacing. Needs at least two sizes and positive errors.
[[nodiscard]] double convergence_order(std::span<const double> sizes,
                                       std::span<const double> errors);

}  // namespace fockflow

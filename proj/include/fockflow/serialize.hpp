#pragma once

#include <json.hpp>

#include "fockflow/kernel.hpp"

namespace fockflow {

// Complex numbers are [re, im] pairs; matrices are row lists of such pairs.
[[nodiscard]] nlohmann::json complex_to_json(cplx z);
[[nodiscard]] cplx complex_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json matrix_to_json(const Matrix& m);
// Accepts a matrix, or a bare number / [re, im] pair as a 1 x 1 matrix.
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json grid_to_json(const Grid& g);
[[nodiscard]] Grid grid_from_json(const nlohmann::json& j);

// {"grid": {...}, "blocks": [{"table": [ann, time, gauge, cre], "matrix": ...}]}
// where each table entry is a list of point indices.
[[nodiscard]] nlohmann::json kernel_to_json(const Kernel& k);
[[nodiscard]] Kernel kernel_from_json(const nlohmann::json& j);

}  // namespace fockflow

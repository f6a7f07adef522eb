#include "fockflow/serialize.hpp"

namespace fockflow {

using nlohmann::json;

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw DomainError("expected a number or an [re, im] pair, got " + j.dump());
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

bool is_pair(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

}  // namespace

Matrix matrix_from_json(const json& j) {
  if (j.is_number() || is_pair(j)) return Matrix::Constant(1, 1, complex_from_json(j));
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw DomainError("expected a matrix as a list of rows of [re, im] pairs");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Index>(j[i].size()) != cols) {
      throw DomainError("matrix rows must all have the same length");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

json grid_to_json(const Grid& g) {
  return {{"times", g.times()},
          {"weights", g.weights()},
          {"noise_dim", g.noise_dim()},
          {"system_dim", g.system_dim()}};
}

Grid grid_from_json(const json& j) {
  return Grid(j.at("times").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>(),
              j.value("noise_dim", 1), j.value("system_dim", 1));
}

namespace {

Chain chain_from_json(const json& j, int points) {
  std::uint32_t bits = 0;
  for (const json& p : j) {
    const int idx = p.get<int>();
    if (idx < 0 || idx >= points) throw DomainError("table refers to a point outside the grid");
    if (bits & (1u << idx)) throw DomainError("table repeats a point within one chain");
    bits |= 1u << idx;
  }
  return Chain(bits);
}

}  // namespace

json kernel_to_json(const Kernel& k) {
  json blocks = json::array();
  k.for_each([&](const KernelTable& t, const Matrix& b) {
    json table = json::array({t.annihilation.points(), t.time.points(), t.gauge.points(),
                              t.creation.points()});
    blocks.push_back({{"table", std::move(table)}, {"matrix", matrix_to_json(b)}});
  });
  return {{"grid", grid_to_json(k.grid())}, {"blocks", std::move(blocks)}};
}

Kernel kernel_from_json(const json& j) {
  Kernel k(grid_from_json(j.at("grid")));
  const int m = k.grid().size();
  for (const json& entry : j.at("blocks")) {
    const json& table = entry.at("table");
    if (!table.is_array() || table.size() != 4) {
      throw DomainError("a table is four lists of point indices");
    }
    const KernelTable t =
        KernelTable::make(chain_from_json(table[0], m), chain_from_json(table[1], m),
                          chain_from_json(table[2], m), chain_from_json(table[3], m));
    k.set(t, matrix_from_json(entry.at("matrix")));
  }
  return k;
}

}  // namespace fockflow

#pragma once

#include <span>
#include <vector>

#include "fockflow/chain_space.hpp"
#include "fockflow/types.hpp"

namespace fockflow {

// Ordered list of points whose noise factors make up one side of a block,
// after the system factor.
using Legs = std::vector<int>;

[[nodiscard]] Legs legs_of(Chain c);
[[nodiscard]] Legs concat(const Legs& a, const Legs& b);
[[nodiscard]] Legs concat(Chain a, Chain b);

[[nodiscard]] Index power(int d, int k);

// Index map for moving the noise legs of a (sys * d^k)-dimensional space from
// the order `from` to the order `to`: entry i is the old index of new index i.
[[nodiscard]] std::vector<Index> leg_permutation(Index sys, int d, std::span<const int> from,
                                                 std::span<const int> to);

[[nodiscard]] Matrix reorder_rows(const Matrix& m, Index sys, int d, const Legs& from,
                                  const Legs& to);
[[nodiscard]] Matrix reorder_cols(const Matrix& m, Index sys, int d, const Legs& from,
                                  const Legs& to);

// m (x) identity on `extra` further noise legs, appended after the existing
// legs on both sides.
[[nodiscard]] Matrix pad_identity(const Matrix& m, int d, int extra);

// A block whose row legs and column legs are named by points, so products can
// align shared legs regardless of their storage order.
struct LegBlock {
  Matrix m;
  Legs out;
  Legs in;

  // Reorders to the requested leg orders (same sets).
  [[nodiscard]] LegBlock arranged(Index sys, int d, const Legs& new_out, const Legs& new_in) const;
};

// Composition a * b after moving b's output legs into a's input order.
[[nodiscard]] LegBlock compose(const LegBlock& a, const LegBlock& b, Index sys, int d);

// Semitensor product (a (x) I on b's extra outputs)(b (x) I on a's extra
// inputs): legs of a not consumed by b pass through, and vice versa.
[[nodiscard]] LegBlock semitensor(const LegBlock& a, const LegBlock& b, Index sys, int d);

}  // namespace fockflow

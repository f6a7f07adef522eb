#include "fockflow/legs.hpp"

#include <algorithm>

namespace fockflow {

Legs legs_of(Chain c) { return c.points(); }

Legs concat(const Legs& a, const Legs& b) {
  Legs out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Legs concat(Chain a, Chain b) { return concat(a.points(), b.points()); }

Index power(int d, int k) {
  Index p = 1;
  for (int i = 0; i < k; ++i) p *= d;
  return p;
}

std::vector<Index> leg_permutation(Index sys, int d, std::span<const int> from,
                                   std::span<const int> to) {
  const int k = static_cast<int>(from.size());
  if (static_cast<int>(to.size()) != k) throw StructureError("leg permutation: length mismatch");
  // where[j]: position in `to` of the leg stored at position j of `from`.
  std::vector<int> where(k);
  for (int j = 0; j < k; ++j) {
    const auto it = std::find(to.begin(), to.end(), from[j]);
    if (it == to.end()) throw StructureError("leg permutation: leg sets differ");
    where[j] = static_cast<int>(it - to.begin());
  }
  const Index legs = power(d, k);
  std::vector<Index> perm(static_cast<std::size_t>(sys * legs));
  std::vector<int> digits(k);
  for (Index r = 0; r < legs; ++r) {
    Index rem = r;
    for (int j = k - 1; j >= 0; --j) {
      digits[j] = static_cast<int>(rem % d);
      rem /= d;
    }
    Index old = 0;
    for (int j = 0; j < k; ++j) old = old * d + digits[where[j]];
    for (Index s = 0; s < sys; ++s) perm[s * legs + r] = s * legs + old;
  }
  return perm;
}

namespace {

bool trivial(int d, const Legs& from, const Legs& to) { return d == 1 || from == to; }

}  // namespace

Matrix reorder_rows(const Matrix& m, Index sys, int d, const Legs& from, const Legs& to) {
  if (trivial(d, from, to)) {
    if (from.size() != to.size()) throw StructureError("reorder: leg count mismatch");
    return m;
  }
  const auto perm = leg_permutation(sys, d, from, to);
  if (static_cast<Index>(perm.size()) != m.rows()) throw StructureError("reorder: row count");
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) out.row(i) = m.row(perm[i]);
  return out;
}

Matrix reorder_cols(const Matrix& m, Index sys, int d, const Legs& from, const Legs& to) {
  if (trivial(d, from, to)) {
    if (from.size() != to.size()) throw StructureError("reorder: leg count mismatch");
    return m;
  }
  const auto perm = leg_permutation(sys, d, from, to);
  if (static_cast<Index>(perm.size()) != m.cols()) throw StructureError("reorder: column count");
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) out.col(j) = m.col(perm[j]);
  return out;
}

Matrix pad_identity(const Matrix& m, int d, int extra) {
  const Index e = power(d, extra);
  if (e == 1) return m;
  Matrix out = Matrix::Zero(m.rows() * e, m.cols() * e);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      if (v == cplx{}) continue;
      for (Index k = 0; k < e; ++k) out(i * e + k, j * e + k) = v;
    }
  }
  return out;
}

LegBlock LegBlock::arranged(Index sys, int d, const Legs& new_out, const Legs& new_in) const {
  return {reorder_cols(reorder_rows(m, sys, d, out, new_out), sys, d, in, new_in), new_out, new_in};
}

LegBlock compose(const LegBlock& a, const LegBlock& b, Index sys, int d) {
  const Matrix right = reorder_rows(b.m, sys, d, b.out, a.in);
  if (a.m.cols() != right.rows()) throw StructureError("compose: inner dimension mismatch");
  return {a.m * right, a.out, b.in};
}

LegBlock semitensor(const LegBlock& a, const LegBlock& b, Index sys, int d) {
  // Legs b produces that a does not read pass through a, and legs a reads
  // that b does not produce pass through b.
  Legs pass_a, pass_b;
  for (int p : b.out) {
    if (std::find(a.in.begin(), a.in.end(), p) == a.in.end()) pass_a.push_back(p);
  }
  for (int p : a.in) {
    if (std::find(b.out.begin(), b.out.end(), p) == b.out.end()) pass_b.push_back(p);
  }
  const LegBlock wide_a{pad_identity(a.m, d, static_cast<int>(pass_a.size())),
                        concat(a.out, pass_a), concat(a.in, pass_a)};
  const LegBlock wide_b{pad_identity(b.m, d, static_cast<int>(pass_b.size())),
                        concat(b.out, pass_b), concat(b.in, pass_b)};
  return compose(wide_a, wide_b, sys, d);
}

}  // namespace fockflow

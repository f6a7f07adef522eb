#include <cmath>

#include <gtest/gtest.h>

#include "fockflow/chain_space.hpp"
#include "fockflow/random.hpp"

using namespace fockflow;

namespace {

FockVector random_vector(const SpacePtr& s, Rng& rng) {
  return FockVector(s, rng.vector(s->dim()));
}

}  // namespace

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(Grid({0.0, 0.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(Grid({0.0, 1.0}, {1.0, 0.0}), DomainError);
  EXPECT_THROW(Grid({0.0}, {1.0}, 0, 1), DomainError);
  EXPECT_THROW(Grid({0.0}, {1.0}, 1, 0), DomainError);
  EXPECT_NO_THROW(Grid({}, {}));
}

TEST(Grid, UniformWeights) {
  const Grid g = Grid::uniform(4, 1.0);
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(g.weight(k), 0.25);
    EXPECT_DOUBLE_EQ(g.time(k), 0.25 * k);
  }
}

TEST(EnumerateChains, SmallGrids) {
  EXPECT_EQ(enumerate_chains(Grid::uniform(0, 1.0)), std::vector<Chain>{Chain{}});
  EXPECT_EQ(enumerate_chains(Grid::uniform(1, 1.0)),
            (std::vector<Chain>{Chain{}, Chain::of({0})}));
  EXPECT_EQ(enumerate_chains(Grid::uniform(2, 1.0)),
            (std::vector<Chain>{Chain{}, Chain::of({0}), Chain::of({1}), Chain::of({0, 1})}));
}

TEST(EnumerateChains, GradedThenLexicographic) {
  const auto c = enumerate_chains(Grid::uniform(3, 1.0));
  const std::vector<Chain> expected{Chain{},           Chain::of({0}),    Chain::of({1}),
                                    Chain::of({2}),    Chain::of({0, 1}), Chain::of({0, 2}),
                                    Chain::of({1, 2}), Chain::of({0, 1, 2})};
  EXPECT_EQ(c, expected);
}

TEST(ChainWeight, Products) {
  const Grid g({0.0, 1.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(chain_weight(g, Chain{}), 1.0);
  EXPECT_DOUBLE_EQ(chain_weight(g, Chain::of({0})), 0.5);
  EXPECT_DOUBLE_EQ(chain_weight(g, Chain::of({0, 1})), 0.25);
}

TEST(FockSpace, DimensionMatchesBinomialCount) {
  for (int m = 0; m <= 4; ++m) {
    for (int d = 1; d <= 3; ++d) {
      const FockSpace s(Grid::uniform(m, 1.0, d, 2));
      EXPECT_EQ(s.dim(), 2 * static_cast<Index>(std::pow(1 + d, m)));
    }
  }
}

TEST(ScaleNorm, Examples) {
  const auto s = make_space(Grid({0.0}, {0.5}));
  const FockVector vac = FockVector::vacuum(s);
  EXPECT_DOUBLE_EQ(scale_norm(vac, ScaleParams(3.0)), 1.0);
  FockVector a(s);
  a.set_block(Chain::of({0}), Vector::Ones(1));
  EXPECT_NEAR(scale_norm(a, ScaleParams(2.0)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(scale_norm(FockVector(s), ScaleParams(1.0)), 0.0);
  EXPECT_THROW(ScaleParams(0.0), DomainError);
}

TEST(ScaleNorm, UnitScaleIsWeightedEuclidean) {
  Rng rng(3);
  const auto s = make_space(Grid({0.0, 0.3, 0.9}, {0.2, 0.7, 1.3}, 2, 1));
  const FockVector a = random_vector(s, rng);
  Vector scaled = a.coeffs();
  for (Chain c : s->chains()) {
    scaled.segment(s->offset(c), s->block_size(c)) *= std::sqrt(chain_weight(s->grid(), c));
  }
  EXPECT_NEAR(scale_norm(a, ScaleParams(1.0)), scaled.norm(), 1e-13);
}

TEST(ScaleNorm, MonotoneInScale) {
  Rng rng(5);
  const auto s = make_space(Grid::uniform(3, 1.5));
  const FockVector a = random_vector(s, rng);
  double prev = 0.0;
  for (double xi : {0.1, 0.5, 1.0, 2.0, 7.0}) {
    const double v = scale_norm(a, ScaleParams(xi));
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(PointDerivative, EmptyIsIdentity) {
  Rng rng(1);
  const auto s = make_space(Grid::uniform(2, 1.0, 2));
  const FockVector a = random_vector(s, rng);
  const auto der = point_derivative(a, Chain{});
  ASSERT_EQ(der.size(), s->chains().size());
  for (Chain c : s->chains()) EXPECT_EQ(der.at(c), a.block(c));
}

TEST(PointDerivative, Relabeling) {
  const auto s = make_space(Grid::uniform(2, 1.0));
  FockVector a(s);
  a.set_block(Chain::of({0, 1}), Vector::Ones(1));
  const auto der = point_derivative(a, Chain::of({1}));
  EXPECT_EQ(der.size(), 2u);
  EXPECT_EQ(der.at(Chain::of({0}))(0), cplx(1.0));
  EXPECT_EQ(der.at(Chain{})(0), cplx(0.0));
}

TEST(PointDerivative, MovesDifferentiatedLegsLast) {
  // d = 2: a({x0, x1}) has legs (x0, x1); the derivative at x0 lists x1 first.
  const auto s = make_space(Grid::uniform(2, 1.0, 2));
  FockVector a(s);
  Vector b(4);
  b << 1.0, 2.0, 3.0, 4.0;  // index = 2 * e0 + e1
  a.set_block(Chain::of({0, 1}), b);
  const Vector v = point_derivative(a, Chain::of({0})).at(Chain::of({1}));
  // New index = 2 * e1 + e0.
  EXPECT_EQ(v(0), cplx(1.0));
  EXPECT_EQ(v(1), cplx(3.0));
  EXPECT_EQ(v(2), cplx(2.0));
  EXPECT_EQ(v(3), cplx(4.0));
}

TEST(PointDerivative, IsometryIdentity) {
  Rng rng(11);
  const auto s = make_space(Grid({0.0, 0.2, 0.5}, {0.3, 0.6, 0.45}, 2, 2));
  const FockVector a = random_vector(s, rng);
  const Grid& g = s->grid();
  for (auto [xi, eta] : {std::pair{0.5, 1.5}, std::pair{2.0, 0.25}, std::pair{1.0, 1.0}}) {
    double lhs = 0.0;
    for (Chain theta : s->chains()) {
      const auto der = point_derivative(a, theta);
      for (const auto& [sigma, block] : der) {
        lhs += std::pow(xi, theta.size()) * std::pow(eta, sigma.size()) *
               chain_weight(g, theta) * chain_weight(g, sigma) * block.squaredNorm();
      }
    }
    const double rhs = std::pow(scale_norm(a, ScaleParams(xi + eta)), 2);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
  }
}

TEST(SumIntegralSplit, ConstantFunction) {
  const auto [lhs, rhs] =
      sum_integral_split(Grid({0.0}, {0.5}), [](Chain, Chain, Chain) { return cplx(1.0); });
  EXPECT_NEAR(std::abs(lhs - 2.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rhs - 2.5), 0.0, 1e-15);
  const Grid g4 = Grid::uniform(4, 2.0);
  const auto [l4, r4] = sum_integral_split(g4, [](Chain, Chain, Chain) { return cplx(1.0); });
  EXPECT_NEAR(l4.real(), std::pow(1.0 + 3.0 * 0.5, 4), 1e-12);
  EXPECT_NEAR(r4.real(), l4.real(), 1e-12);
}

TEST(SumIntegralSplit, ZeroFunction) {
  const auto [lhs, rhs] =
      sum_integral_split(Grid::uniform(2, 1.0), [](Chain, Chain, Chain) { return cplx(0.0); });
  EXPECT_EQ(lhs, cplx(0.0));
  EXPECT_EQ(rhs, cplx(0.0));
}

TEST(SumIntegralSplit, ArbitraryFunctionAgrees) {
  Rng rng(17);
  for (int m = 1; m <= 4; ++m) {
    const Grid g({0.0, 0.1, 0.4, 0.8}, {0.3, 0.9, 0.2, 1.1});
    const Grid grid(std::vector<double>(g.times().begin(), g.times().begin() + m),
                    std::vector<double>(g.weights().begin(), g.weights().begin() + m));
    const std::size_t n = std::size_t{1} << m;
    std::vector<cplx> values(n * n * n);
    for (cplx& v : values) v = rng.complex_normal();
    const auto f = [&](Chain a, Chain b, Chain c) {
      return values[(a.bits() * n + b.bits()) * n + c.bits()];
    };
    const auto [lhs, rhs] = sum_integral_split(grid, f);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

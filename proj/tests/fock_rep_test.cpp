#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fockflow/convergence.hpp"
#include "fockflow/gates.hpp"
#include "fockflow/integrals.hpp"
#include "fockflow/sampling.hpp"

using namespace fockflow;

namespace {

constexpr double kExact = 1e-12;

const Grid kOnePoint({0.0}, {0.5});

Matrix m2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Kernel process(Slot slot, cplx v, const Grid& g = kOnePoint) {
  return product_kernel(PointFactor::scalar(slot, v), g);
}

// Direct evaluation of [iota(T) a](chain) for d = 1.
Vector iota_apply(const Kernel& t, const FockVector& a, Chain out) {
  const FockSpace& s = a.space();
  const Grid& g = s.grid();
  const Chain all = Chain::all(g.size());
  Vector acc = Vector::Zero(g.system_dim());
  for_each_subset(out, [&](Chain gauge) {
    const Chain cre = out - gauge;
    for_each_subset(all - out, [&](Chain ann) {
      for_each_subset(all - out - ann, [&](Chain time) {
        const KernelTable k{ann, time, gauge, cre};
        if (!t.has(k)) return;
        acc += chain_weight(g, ann) * chain_weight(g, time) * t.at(k) * a.block(gauge | ann);
      });
    });
  });
  return acc;
}

OperatorKernel random_operator_kernel(const SpacePtr& s, Rng& rng, double density = 1.0) {
  OperatorKernel b(s);
  for (std::size_t code = 0; code < table_count(s->grid().size()); ++code) {
    if (rng.uniform(0.0, 1.0) >= density) continue;
    b.set(table_from_code(code, s->grid().size()), rng.matrix(s->dim(), s->dim()));
  }
  return b;
}

BiKernel random_bikernel(const Grid& g, Rng& rng, double density = 1.0) {
  BiKernel l(g);
  const Kernel shape(g);
  for (std::size_t a = 0; a < table_count(g.size()); ++a) {
    for (std::size_t b = 0; b < table_count(g.size()); ++b) {
      const KernelTable theta = table_from_code(a, g.size());
      const KernelTable kappa = table_from_code(b, g.size());
      if (!disjoint(theta, kappa) || rng.uniform(0.0, 1.0) >= density) continue;
      const KernelTable u = theta | kappa;
      l.set(theta, kappa, rng.matrix(shape.rows(u), shape.cols(u)));
    }
  }
  return l;
}

IntegrandTable random_integrand(const SpacePtr& s, Rng& rng) {
  IntegrandTable d = IntegrandTable::zero(s);
  for (Slot slot : kSlots) {
    for (auto& m : d.slot(slot)) m = rng.matrix(s->dim(), s->dim());
  }
  return d;
}

}  // namespace

TEST(Iota, UnitIsIdentity) {
  for (const Grid& g : {kOnePoint, Grid::uniform(3, 1.0, 1, 2), Grid::uniform(2, 1.0, 2, 1)}) {
    EXPECT_TRUE(iota(unit_kernel(g)).matrix().isIdentity(0.0));
  }
}

TEST(Iota, OnePointFixture) {
  const cplx t{0.4, -0.3}, s{1.2, 0.5}, c{-0.7, 0.2}, g{0.1, 0.9};
  EXPECT_TRUE(iota(process(Slot::creation, t)).matrix().isApprox(m2(1, 0, t, 1)));
  EXPECT_TRUE(iota(process(Slot::annihilation, s)).matrix().isApprox(m2(1, 0.5 * s, 0, 1)));
  EXPECT_TRUE(iota(process(Slot::time, c)).matrix().isApprox(m2(1.0 + 0.5 * c, 0, 0, 1)));
  EXPECT_TRUE(iota(process(Slot::gauge, g)).matrix().isApprox(m2(1, 0, 0, g)));
}

TEST(Iota, AnnihilationCreationIsMultiplicative) {
  const cplx s{1.2, 0.5}, t{0.4, -0.3};
  const Kernel a = process(Slot::annihilation, s), c = process(Slot::creation, t);
  const Matrix lhs = iota(kernel_product(a, c)).matrix();
  const Matrix rhs = iota(a).matrix() * iota(c).matrix();
  EXPECT_LE((lhs - rhs).norm(), kExact);
  EXPECT_LE((lhs - m2(1.0 + 0.5 * s * t, 0.5 * s, t, 1)).norm(), kExact);
}

TEST(Iota, MatchesDirectSummation) {
  Rng rng(31);
  for (const Grid& g : {Grid::uniform(3, 1.0), Grid({0.0, 0.2, 0.9}, {0.3, 0.6, 0.2}, 1, 2)}) {
    const Kernel t = random_kernel(g, rng);
    const SpacePtr s = make_space(g);
    const FockVector a(s, rng.vector(s->dim()));
    const FockVector b = iota(t, s).apply(a);
    for (Chain c : s->chains()) EXPECT_LE((b.block(c) - iota_apply(t, a, c)).norm(), kExact);
  }
}

TEST(Iota, Linear) {
  Rng rng(32);
  const Grid g = Grid::uniform(2, 1.0, 2, 2);
  const Kernel s = random_kernel(g, rng), t = random_kernel(g, rng);
  const cplx z{0.3, -1.1};
  const Matrix lhs = iota(s + t * z).matrix();
  EXPECT_LE((lhs - iota(s).matrix() - z * iota(t).matrix()).norm(), kExact);
}

TEST(IotaAdjoint, Examples) {
  EXPECT_EQ(iota_adjoint_check(unit_kernel(Grid::uniform(2, 1.0))), 0.0);
  const Kernel t = process(Slot::time, I_unit);
  EXPECT_LE(iota_adjoint_check(t), kExact);
  const FockOperator adj = fock_adjoint(iota(t));
  EXPECT_LE((adj.matrix() - m2(cplx(1.0, -0.5), 0, 0, 1)).norm(), kExact);
}

TEST(IotaAdjoint, RandomKernels) {
  Rng rng(33);
  const Grid g3 = Grid({0.0, 0.3, 0.5}, {0.3, 0.2, 0.5});
  const Matrix x = rng.matrix(1, 1);
  EXPECT_LE(iota_adjoint_check(product_kernel(x, random_point_factors(g3, rng), g3)), kExact);
  for (const Grid& g : {g3, Grid::uniform(2, 1.0, 2, 2), Grid::uniform(3, 2.0, 1, 2)}) {
    EXPECT_LE(iota_adjoint_check(random_kernel(g, rng)), 1e-11);
  }
}

TEST(OperatorScaleNorm, Examples) {
  const SpacePtr s = make_space(kOnePoint);
  const FockOperator id = FockOperator::identity(s);
  EXPECT_NEAR(operator_scale_norm(id, 1.7, 1.7), 1.0, 1e-15);
  EXPECT_NEAR(operator_scale_norm(id, 2.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(operator_scale_norm(id, 1.0, 2.0), std::sqrt(2.0), 1e-14);
  EXPECT_THROW((void)operator_scale_norm(id, 0.0, 1.0), DomainError);
}

TEST(OperatorScaleNorm, AdjointDuality) {
  Rng rng(34);
  const Grid g = Grid({0.0, 0.3, 0.5}, {0.3, 0.2, 0.5}, 1, 2);
  for (int rep = 0; rep < 5; ++rep) {
    const Kernel t = random_kernel(g, rng, 0.5);
    const double xp = rng.uniform(0.5, 3.0), xm = rng.uniform(0.2, 2.0);
    const double lhs = operator_scale_norm(iota(kernel_adjoint(t)), 1.0 / xm, 1.0 / xp);
    const double rhs = operator_scale_norm(iota(t), xp, xm);
    EXPECT_NEAR(lhs, rhs, 1e-10 * rhs);
  }
}

TEST(SingleIntegrals, Examples) {
  const SpacePtr s = make_space(kOnePoint);
  EXPECT_TRUE(single_integrals(1.0, IntegrandTable::zero(s)).matrix().isZero(0.0));
  const cplx c{0.3, 0.4};
  IntegrandTable d = IntegrandTable::zero(s);
  d.time[0] = c * identity(2);
  EXPECT_LE((single_integrals(0.5, d).matrix() - 0.5 * c * identity(2)).norm(), kExact);
  EXPECT_TRUE(single_integrals(0.0, d).matrix().isZero(0.0));
  const cplx t{-0.2, 0.7};
  IntegrandTable e = IntegrandTable::zero(s);
  e.creation[0] = t * identity(2);
  const Matrix expect = iota(process(Slot::creation, t)).matrix() - identity(2);
  EXPECT_LE((single_integrals(1.0, e).matrix() - expect).norm(), kExact);
}

TEST(MultipleIntegral, Examples) {
  Rng rng(35);
  const SpacePtr s = make_space(Grid::uniform(2, 1.0, 1, 2));
  OperatorKernel b(s);
  b.set(KernelTable{}, identity(s->dim()));
  EXPECT_TRUE(multiple_integral(0.7, b).matrix().isIdentity(0.0));
  const OperatorKernel r = random_operator_kernel(s, rng);
  EXPECT_LE((multiple_integral(0.0, r).matrix() - r.at(KernelTable{})).norm(), 0.0);

  const cplx t{0.5, -0.25};
  const SpacePtr one = make_space(kOnePoint);
  OperatorKernel c(one);
  c.set(KernelTable{}, identity(2));
  c.set(KernelTable::elementary(0, Slot::creation), t * identity(2));
  EXPECT_LE((multiple_integral(5.0, c).matrix() - iota(process(Slot::creation, t)).matrix()).norm(),
            kExact);
}

TEST(QsDerivatives, EmptyTableGivesZero) {
  const SpacePtr s = make_space(Grid::uniform(2, 1.0));
  OperatorKernel b(s);
  b.set(KernelTable{}, identity(s->dim()));
  const IntegrandTable d = qs_derivatives(b);
  for (Slot slot : kSlots) {
    for (const Matrix& m : d.slot(slot)) EXPECT_TRUE(m.isZero(0.0));
  }
}

TEST(QsDerivatives, ReconstructIncrement) {
  Rng rng(36);
  for (const Grid& g : {Grid({0.0, 0.3, 0.5}, {0.3, 0.2, 0.5}), Grid::uniform(2, 1.0, 1, 2)}) {
    const SpacePtr s = make_space(g);
    const OperatorKernel b = random_operator_kernel(s, rng);
    const IntegrandTable d = qs_derivatives(b);
    std::vector<double> ts(g.times());
    ts.push_back(g.times().back() + 1.0);
    for (double t : ts) {
      for (double shift : {0.0, 0.01}) {
        const Matrix lhs = multiple_integral(t + shift, b).matrix();
        const Matrix rhs = b.at(KernelTable{}) + single_integrals(t + shift, d).matrix();
        EXPECT_LE(fock_norm(FockOperator(s, lhs - rhs)), kExact);
      }
    }
  }
}

TEST(NTransform, Examples) {
  Rng rng(37);
  const Grid g = Grid::uniform(2, 1.0);
  Kernel delta(g);
  delta.set(KernelTable{}, identity(1));
  EXPECT_LE(max_difference(n_transform(10.0, pointwise_bikernel(delta)), unit_kernel(g)), 0.0);
  const Kernel l = random_kernel(g, rng);
  Kernel head(g);
  head.set(KernelTable{}, l.at(KernelTable{}));
  EXPECT_LE(max_difference(n_transform(0.0, pointwise_bikernel(l)),
                           n_transform(10.0, pointwise_bikernel(head))),
            0.0);
}

TEST(NTransform, MatchesSubTableEnumeration) {
  Rng rng(38);
  const Grid g = Grid::uniform(2, 1.0);
  const BiKernel l = random_bikernel(g, rng);
  for (double t : {0.0, 0.3, 0.6, 2.0}) {
    const Kernel k = n_transform(t, l);
    const Chain past = points_before(g, t);
    for (std::size_t code = 0; code < table_count(2); ++code) {
      const KernelTable kappa = table_from_code(code, 2);
      cplx expect{};
      for (std::size_t sub = 0; sub < table_count(2); ++sub) {
        const KernelTable theta = table_from_code(sub, 2);
        if (!sub_table(theta, kappa) || !theta.support().subset_of(past)) continue;
        expect += l.at(theta, kappa - theta)(0, 0);
      }
      EXPECT_NEAR(std::abs(k.at(kappa)(0, 0) - expect), 0.0, 1e-13);
    }
  }
}

TEST(Intertwining, Exact) {
  Rng rng(39);
  for (const Grid& g : {Grid::uniform(2, 1.0), Grid({0.0, 0.3, 0.5}, {0.3, 0.2, 0.5}),
                        Grid::uniform(2, 1.0, 1, 2)}) {
    const BiKernel l = random_bikernel(g, rng, 0.6);
    const BiKernel p = pointwise_bikernel(random_kernel(g, rng));
    for (double t : {0.0, 0.4, 0.55, 3.0}) {
      EXPECT_LE(check_intertwining(t, l), kExact);
      EXPECT_LE(check_intertwining(t, p), kExact);
    }
  }
}

TEST(Adaptedness, Kernels) {
  Rng rng(40);
  const Grid g = Grid::uniform(3, 1.0, 2, 1);
  EXPECT_TRUE(is_adapted(unit_kernel(g), 0.5));
  const BiKernel l = pointwise_bikernel(random_kernel(g, rng));
  for (double t : {0.0, 0.2, 0.5, 0.9, 1.5}) EXPECT_TRUE(is_adapted(n_transform(t, l), t));
  Kernel bad = unit_kernel(g);
  bad.set(KernelTable::elementary(2, Slot::creation), Matrix::Ones(2, 1));
  EXPECT_FALSE(is_adapted(bad, 0.5));
  Kernel gauge = unit_kernel(g);
  gauge.set(KernelTable::elementary(2, Slot::gauge), 2.0 * identity(2));
  EXPECT_FALSE(is_adapted(gauge, 0.5));
  EXPECT_TRUE(is_adapted(gauge, 1.0));
}

TEST(IntegrabilityNorms, Examples) {
  const SpacePtr s = make_space(Grid::uniform(4, 2.0));
  const IntegrabilityNorms zero = integrability_norms(IntegrandTable::zero(s), 5.0, 1.0, 1.0);
  EXPECT_EQ(zero.gauge + zero.creation + zero.annihilation + zero.time, 0.0);
  const cplx c{0.6, -0.8};
  IntegrandTable d = IntegrandTable::zero(s);
  for (auto& m : d.time) m = c * identity(s->dim());
  EXPECT_NEAR(integrability_norms(d, 5.0, 1.0, 1.0).time, 4 * 0.5 * std::abs(c), 1e-13);
  const cplx gv{0.0, 1.5};
  IntegrandTable e = IntegrandTable::zero(s);
  for (auto& m : e.gauge) m = gv * identity(s->dim());
  EXPECT_NEAR(integrability_norms(e, 5.0, 2.0, 1.0).gauge,
              operator_scale_norm(FockOperator(s, gv * identity(s->dim())), 2.0, 1.0), 1e-13);
}

TEST(MultiNorm, Examples) {
  const SpacePtr s = make_space(Grid::uniform(2, 1.0));
  const EtaTriple e{};
  EXPECT_EQ(multi_norm(OperatorKernel(s), 1.0, e, e), 0.0);
  OperatorKernel b(s);
  b.set(KernelTable{}, 2.5 * identity(s->dim()));
  EXPECT_NEAR(multi_norm(b, 1.0, e, e), 2.5, 1e-14);
}

TEST(MultiNorm, BoundsTheMultipleIntegral) {
  Rng rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const SpacePtr s = make_space(Grid({0.0, 0.4}, {0.4, 0.6}, 1, 2));
    const OperatorKernel b = random_operator_kernel(s, rng, 0.7);
    const EtaTriple up{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};
    const EtaTriple lo{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};
    const double xp = up.minus + up.zero + up.plus;
    const double xm = 1.0 / (1.0 / lo.minus + 1.0 / lo.zero + 1.0 / lo.plus);
    const double t = 1.0;
    EXPECT_LE(operator_scale_norm(multiple_integral(t, b), xp, xm),
              multi_norm(b, t, up, lo) * (1.0 + 1e-9));
  }
}

TEST(ItoSums, IdentityProcess) {
  Rng rng(42);
  const SpacePtr s = make_space(Grid::uniform(3, 1.0));
  const IntegrandTable b = random_integrand(s, rng);
  const StepProcess u{{0.0}, {FockOperator::identity(s)}};
  EXPECT_LE(ito_sum_compare(1.0, b, u), kExact);
}

TEST(ItoSums, OneStepAdaptedProcess) {
  Rng rng(43);
  const Grid g = Grid::uniform(2, 1.0, 1, 2);
  const SpacePtr s = make_space(g);
  const IntegrandTable b = random_integrand(s, rng);
  // U_1 acts on the system and the first point only.
  const Kernel past = product_kernel(rng.matrix(2, 2),
                                     {random_point_factor(1, rng), PointFactor::unit(1)}, g);
  const StepProcess u{{0.0, 0.5}, {FockOperator::identity(s), iota(past, s)}};
  EXPECT_LE(adaptedness_defect(iota(past, s), 0.5), kExact);
  for (double t : {0.25, 0.5, 0.75, 1.0}) EXPECT_LE(ito_sum_compare(t, b, u), kExact);
}

TEST(ItoSums, RejectsNonAdaptedProcess) {
  Rng rng(44);
  const Grid g = Grid::uniform(2, 1.0);
  const SpacePtr s = make_space(g);
  const StepProcess u{{0.0}, {iota(process(Slot::creation, 1.0, g), s)}};
  EXPECT_THROW((void)ito_sum_compare(1.0, random_integrand(s, rng), u), DomainError);
}

TEST(NormBound, ExponentialEstimate) {
  Rng rng(45);
  for (int rep = 0; rep < 20; ++rep) {
    const Grid g = Grid::uniform(3, 1.0, 1, rng.integer(1, 2));
    const Kernel t = random_kernel(g, rng, 0.5);
    WeightMatrix zeta;
    double gauge_sup = 0.0;
    for (int x = 0; x < g.size(); ++x) {
      zeta.push_back({rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.1, 1.5),
                      rng.uniform(0.1, 2.0)});
      gauge_sup = std::max(gauge_sup, zeta.back().gauge);
    }
    const double xm = rng.uniform(0.2, 1.0);
    const double xp = xm * gauge_sup * gauge_sup * rng.uniform(1.1, 3.0);
    const double eps = epsilon_bound(xp, xm, gauge_sup);
    EXPECT_LE(operator_scale_norm(iota(t), xp, xm), iota_norm_bound(t, zeta, eps) * (1 + 1e-9));
  }
  EXPECT_THROW((void)epsilon_bound(1.0, 1.0, 1.0), DomainError);
}


TEST(ProductGates, MatchIotaOfProductKernels) {
  Rng rng(41);
  for (const Grid& g : {Grid::uniform(3, 1.0, 2, 2), Grid::uniform(4, 1.0, 1, 3)}) {
    const auto f = random_point_factors(g, rng);
    const Matrix x = rng.matrix(g.system_dim(), g.system_dim());
    const SpacePtr s = make_space(g);
    EXPECT_LE((product_gates(x, f, s).dense().matrix() - iota(product_kernel(x, f, g), s).matrix()).norm(),
              kExact);
  }
}

TEST(ProductGates, DefectMatchesDenseKernelProduct) {
  Rng rng(42);
  const Grid g = Grid::uniform(3, 1.0, 2, 2);
  const auto f = random_point_factors(g, rng);
  const auto h = random_point_factors(g, rng);
  const Matrix x = rng.matrix(2, 2), y = rng.matrix(2, 2);
  const Kernel s = product_kernel(x, f, g), t = product_kernel(y, h, g);
  const SpacePtr space = make_space(g);
  const FockOperator dense{space, iota(kernel_product(s, t), space).matrix() -
                                      iota(s, space).matrix() * iota(t, space).matrix()};
  EXPECT_NEAR(product_multiplicativity_defect(x, f, y, h, g, 1.0, 0.25),
              operator_scale_norm(dense, 1.0, 0.25), 1e-10);
  EXPECT_NEAR(product_multiplicativity_defect(x, f, y, h, g, 1.0, 1.0), fock_norm(dense), 1e-10);
}

TEST(ProductGates, AnnihilationBeforeCreationIsExactOnAnyGrid) {
  const Grid g = Grid::uniform(12, 1.0);
  const std::vector<PointFactor> ann(12, PointFactor::scalar(Slot::annihilation, {0.3, 0.1}));
  const std::vector<PointFactor> cre(12, PointFactor::scalar(Slot::creation, {-0.2, 0.4}));
  EXPECT_LE(product_multiplicativity_defect(identity(1), ann, identity(1), cre, g, 1.0, 1.0), kExact);
  EXPECT_GT(product_multiplicativity_defect(identity(1), cre, identity(1), ann, g, 1.0, 1.0), 1e-3);
}

TEST(ProductGates, MultiplicativityDefectIsFirstOrder) {
  // Single draws can still be pre-asymptotic at M = 2, so the order is the
  // median over a fixed batch of instances.
  std::vector<double> slopes;
  for (int instance = 0; instance < 20; ++instance) {
    std::vector<double> sizes, defects;
    for (int m : {2, 4, 8, 16}) {
      const Grid g = Grid::uniform(m, 1.0, 1, 2);
      Rng draw(500 + instance);
      const Matrix x = draw.matrix(2, 2), y = draw.matrix(2, 2);
      const auto f = smooth_point_factors(g, draw, 0.3);
      const auto h = smooth_point_factors(g, draw, 0.3);
      sizes.push_back(m);
      defects.push_back(product_multiplicativity_defect(x, f, y, h, g, 1.0, 0.25));
    }
    slopes.push_back(convergence_order(sizes, defects));
  }
  std::sort(slopes.begin(), slopes.end());
  EXPECT_GE(0.5 * (slopes[9] + slopes[10]), 0.8);
}

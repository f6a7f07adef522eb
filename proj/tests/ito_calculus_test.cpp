#include <array>
#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "fockflow/convergence.hpp"
#include "fockflow/ito.hpp"
#include "fockflow/sampling.hpp"

using namespace fockflow;

namespace {

constexpr double kExact = 1e-12;

TriangularMatrix random_triangular(Rng& rng, Index outer, Index inner) {
  return TriangularMatrix::from_blocks(rng.matrix(outer, outer), rng.matrix(outer, inner),
                                       rng.matrix(outer, outer), rng.matrix(inner, inner),
                                       rng.matrix(inner, outer), rng.matrix(outer, outer));
}

// Zero corners, as for a Hamiltonian matrix.
TriangularMatrix random_generator(Rng& rng, Index outer, Index inner) {
  const Matrix z = Matrix::Zero(outer, outer);
  return TriangularMatrix::from_blocks(z, rng.matrix(outer, inner), rng.matrix(outer, outer),
                                       rng.matrix(inner, inner), rng.matrix(inner, outer), z);
}

TriangularMatrix adapted(const Matrix& u) {
  const Index n = u.rows();
  const Matrix z = Matrix::Zero(n, n);
  return TriangularMatrix::from_blocks(u, z, z, u, z, u);
}

Matrix mpow(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

}  // namespace

TEST(PseudoConjugate, IdentityIsFixed) {
  const auto one = TriangularMatrix::identity(2, 3);
  EXPECT_EQ(max_difference(pseudo_conjugate(one), one), 0.0);
}

TEST(PseudoConjugate, CreationEntryMovesToAnnihilation) {
  const cplx e{0.3, -1.2};
  const Matrix z = Matrix::Zero(1, 1);
  const Matrix v = Matrix::Constant(1, 1, e);
  const auto d = TriangularMatrix::from_blocks(z, z, z, z, v, z);
  const auto s = pseudo_conjugate(d);
  EXPECT_NEAR(std::abs(s.annihilation()(0, 0) - std::conj(e)), 0.0, kExact);
  EXPECT_EQ(s.creation().norm(), 0.0);
  EXPECT_EQ(s.time().norm() + s.gauge().norm() + s.minus().norm() + s.plus().norm(), 0.0);
}

TEST(PseudoConjugate, MetricSquaresToOne) {
  const Matrix g = flip_metric(2, 3);
  EXPECT_TRUE((g * g).isApprox(Matrix::Identity(7, 7)));
}

TEST(PseudoConjugate, InvolutionAndAntihomomorphism) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_triangular(rng, 2, 3);
    const auto n = random_triangular(rng, 2, 3);
    EXPECT_LE(max_difference(pseudo_conjugate(pseudo_conjugate(m)), m), kExact);
    EXPECT_LE(max_difference(pseudo_conjugate(m * n), pseudo_conjugate(n) * pseudo_conjugate(m)),
              kExact);
  }
}

TEST(PseudoConjugate, WeightedVersionIsInvolutiveAndAntimultiplicative) {
  Rng rng(12);
  Eigen::VectorXd metric(4);
  metric << 1.0, 0.5, 0.25, 2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_triangular(rng, 4, 4);
    const auto n = random_triangular(rng, 4, 4);
    EXPECT_LE(max_difference(pseudo_conjugate(pseudo_conjugate(m, metric), metric), m), kExact);
    EXPECT_LE(max_difference(pseudo_conjugate(m * n, metric),
                             pseudo_conjugate(n, metric) * pseudo_conjugate(m, metric)),
              kExact);
  }
}

TEST(PseudoConjugate, RejectsStrictlyLowerEntries) {
  Matrix full = Matrix::Identity(3, 3);
  full(2, 0) = 1.0;
  EXPECT_THROW(TriangularMatrix(1, 1, full), StructureError);
}

TEST(TriangularPower, ZerothPowerIsIdentity) {
  Rng rng(13);
  const auto h = random_generator(rng, 2, 2);
  EXPECT_EQ(max_difference(triangular_power(h, 0), TriangularMatrix::identity(2, 2)), 0.0);
}

TEST(TriangularPower, SquareBlocks) {
  Rng rng(14);
  const auto h = random_generator(rng, 2, 3);
  const auto h2 = triangular_power(h, 2);
  EXPECT_LE(spectral_norm(h2.gauge() - h.gauge() * h.gauge()), kExact);
  EXPECT_LE(spectral_norm(h2.time() - h.annihilation() * h.creation()), kExact);
  EXPECT_LE(spectral_norm(h2.annihilation() - h.annihilation() * h.gauge()), kExact);
  EXPECT_LE(spectral_norm(h2.creation() - h.gauge() * h.creation()), kExact);
}

TEST(TriangularPower, NilpotentWithoutGaugePart) {
  Rng rng(15);
  auto h = random_generator(rng, 2, 2);
  h.set_gauge(Matrix::Zero(2, 2));
  EXPECT_LE(triangular_power(h, 3).full().norm(), kExact);
  EXPECT_GT(triangular_power(h, 2).full().norm(), 0.1);
}

TEST(TriangularPower, HigherPowersClosedForm) {
  Rng rng(16);
  const auto h = random_generator(rng, 2, 3);
  for (int n = 1; n <= 4; ++n) {
    const auto p = triangular_power(h, n + 2);
    const Matrix g = h.gauge();
    EXPECT_LE(spectral_norm(p.annihilation() - h.annihilation() * mpow(g, n + 1)), kExact);
    EXPECT_LE(spectral_norm(p.time() - h.annihilation() * mpow(g, n) * h.creation()), kExact);
    EXPECT_LE(spectral_norm(p.gauge() - mpow(g, n + 2)), kExact);
    EXPECT_LE(spectral_norm(p.creation() - mpow(g, n + 1) * h.creation()), kExact);
    EXPECT_EQ(p.minus().norm() + p.plus().norm(), 0.0);
  }
}

TEST(TriangularPower, RejectsNonzeroCorners) {
  EXPECT_THROW((void)triangular_power(TriangularMatrix::identity(1, 1), 2), DomainError);
}

TEST(ItoProductDerivative, VanishesWhenIncrementIsZero) {
  Rng rng(17);
  const auto u = random_triangular(rng, 2, 2);
  EXPECT_LE(ito_product_derivative(u, u).full().norm(), kExact);
}

TEST(ItoProductDerivative, MatchesExpandedForm) {
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_triangular(rng, 2, 2);
    const auto g = random_triangular(rng, 2, 2);
    const auto d = g - u;
    const auto expanded = pseudo_conjugate(u) * d + pseudo_conjugate(d) * u +
                          pseudo_conjugate(d) * d;
    EXPECT_LE(max_difference(ito_product_derivative(u, g), expanded), kExact);
  }
}

TEST(ItoProductDerivative, AdaptedForm) {
  Rng rng(19);
  const Matrix u = rng.matrix(2, 2);
  const auto ua = adapted(u);
  EXPECT_LE(max_difference(pseudo_conjugate(ua), adapted(u.adjoint())), kExact);
  const auto d = random_generator(rng, 2, 2);
  const auto expected = adapted(u.adjoint()) * d + pseudo_conjugate(d) * ua +
                        pseudo_conjugate(d) * d;
  EXPECT_LE(max_difference(ito_product_derivative(ua, ua + d), expected), kExact);
}

TEST(FunctionalCalculus, IdentityFunction) {
  Rng rng(20);
  const auto x = random_triangular(rng, 2, 2);
  const auto a = random_generator(rng, 2, 2);
  const OrderedPolynomial f{{1.0, {0}}};
  const auto r = functional_calculus(f, {x}, {a});
  EXPECT_LE(max_difference(r.before, x), kExact);
  EXPECT_LE(max_difference(r.after, x + a), kExact);
}

TEST(FunctionalCalculus, SquareIncrement) {
  Rng rng(21);
  const auto x = random_triangular(rng, 2, 2);
  auto a = random_generator(rng, 2, 2);
  a.set_gauge(Matrix::Zero(2, 2));
  const OrderedPolynomial square{{1.0, {0, 0}}};
  const auto r = functional_calculus(square, {x}, {a});
  EXPECT_LE(max_difference(r.after - r.before, x * a + a * x + a * a), kExact);
}

TEST(FunctionalCalculus, OrderOfFactorsIsRespected) {
  Rng rng(22);
  const auto x = random_triangular(rng, 2, 2);
  const auto y = random_triangular(rng, 2, 2);
  const auto a = random_generator(rng, 2, 2);
  const auto zero = TriangularMatrix(2, 2);
  const OrderedPolynomial xy{{1.0, {0, 1}}};
  const OrderedPolynomial yx{{1.0, {1, 0}}};
  const auto r1 = functional_calculus(xy, {x, y}, {a, zero});
  const auto r2 = functional_calculus(yx, {x, y}, {a, zero});
  EXPECT_LE(max_difference(r1.after, (x + a) * y), kExact);
  EXPECT_LE(max_difference(r2.after, y * (x + a)), kExact);
}

TEST(FunctionalCalculus, ExponentialOfNilpotentIsFiniteSum) {
  Rng rng(23);
  auto a = random_generator(rng, 2, 2);
  a.set_gauge(Matrix::Zero(2, 2));
  const auto zero = TriangularMatrix(2, 2);
  const auto r = exponential_calculus({zero}, {a});
  const auto one = TriangularMatrix::identity(2, 2);
  EXPECT_LE(max_difference(r.before, one), kExact);
  EXPECT_LE(max_difference(r.after, one + a + a * a * cplx{0.5, 0.0}), kExact);
}

TEST(FunctionalCalculus, ExponentialRejectsNoncommutingArguments) {
  Rng rng(24);
  const auto x = random_triangular(rng, 2, 2);
  const auto a = random_generator(rng, 2, 2);
  try {
    (void)exponential_calculus({x}, {a});
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("commuting"), std::string::npos);
  }
}

TEST(KernelDerivative, ShiftsOneSlot) {
  const Grid g = Grid::uniform(2, 1.0);
  Kernel t(g);
  const KernelTable full = KernelTable::make(Chain::single(0), {}, {}, Chain::single(1));
  t.set(full, Matrix::Constant(1, 1, 2.5));
  const Kernel d = kernel_derivative(t, 1, Slot::creation);
  const KernelTable rest = KernelTable::make(Chain::single(0), {}, {}, {});
  EXPECT_EQ(d.at(rest)(0, 0), cplx(2.5, 0.0));
  EXPECT_FALSE(d.has(full));
  EXPECT_FALSE(kernel_derivative(t, 1, Slot::gauge).has(rest));
}

TEST(ItoFormula, UnitProcessHasNoDefect) {
  const Grid g = Grid::uniform(3, 1.0);
  const KernelProcess unit = [g](double) { return unit_kernel(g); };
  EXPECT_LE(kernel_ito_defect(unit_kernel(g)), kExact);
  EXPECT_LE(operator_ito_defect(unit, g, 2.0, 1.0, 0.25), kExact);
}

TEST(ItoFormula, KernelIdentityOnRandomIntegrand) {
  Rng rng(25);
  const Grid g = Grid::uniform(3, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Kernel l = random_kernel(g, rng, 0.5);
    const KernelProcess p = integrand_process(l);
    for (double t : {0.0, 0.4, 0.7, 2.0}) EXPECT_LE(kernel_ito_defect(p(t)), kExact);
  }
}

TEST(ItoFormula, KernelIdentityOnArbitraryKernel) {
  Rng rng(26);
  const Grid g = Grid::uniform(3, 1.0);
  EXPECT_LE(kernel_ito_defect(random_kernel(g, rng)), kExact);
}

TEST(ItoFormula, KernelIdentityRejectsVectorNoise) {
  const Grid g = Grid::uniform(2, 1.0, 2);
  EXPECT_THROW((void)kernel_ito_defect(unit_kernel(g)), DomainError);
}

TEST(ItoFormula, CreationProcessIsExactOnTheGrid) {
  for (int m : {2, 4}) {
    const Grid g = Grid::uniform(m, 1.0);
    const KernelProcess p = product_process(
        Matrix::Identity(1, 1),
        std::vector<PointFactor>(m, PointFactor::scalar(Slot::creation, 0.7)), g);
    EXPECT_LE(operator_ito_defect(p, g, 2.0, 1.0, 0.25), kExact);
  }
}

TEST(ItoFormula, OperatorDefectIsFirstOrder) {
  PointFactor f = PointFactor::unit(1);
  f.annihilation(0, 0) = 0.2;
  f.time = cplx{0.0, 0.2};
  f.gauge(0, 0) = 0.9;
  f.creation(0, 0) = 0.2;
  std::vector<double> sizes, defects;
  for (int m : {2, 4, 8}) {
    const Grid g = Grid::uniform(m, 1.0);
    const KernelProcess p =
        product_process(Matrix::Identity(1, 1), std::vector<PointFactor>(m, f), g);
    sizes.push_back(m);
    defects.push_back(operator_ito_defect(p, g, 2.0, 1.0, 0.25));
  }
  EXPECT_GT(defects.front(), 1e-3);
  EXPECT_GE(convergence_order(sizes, defects), 0.8);
}

TEST(ItoFormula, IntegrandsAreTriangular) {
  const Grid g = Grid::uniform(2, 1.0);
  const KernelProcess p = product_process(
      Matrix::Identity(1, 1), std::vector<PointFactor>(2, PointFactor::scalar(Slot::gauge, 0.5)),
      g);
  const auto it = ito_integrand(p, make_space(g), 1);
  EXPECT_LE(spectral_norm(it.u.minus() - it.u.plus()), kExact);
  EXPECT_LE(spectral_norm(it.u.minus() - it.g.minus()), kExact);
  EXPECT_GT(spectral_norm(it.g.gauge() - it.u.gauge()), 0.1);
}

TEST(ConvergenceOrder, RecoversPowerLaw) {
  const std::array<double, 3> sizes{2.0, 4.0, 8.0};
  const std::array<double, 3> errors{0.5, 0.25, 0.125};
  EXPECT_NEAR(convergence_order(sizes, errors), 1.0, kExact);
  const std::array<double, 1> one{1.0};
  EXPECT_THROW((void)convergence_order(one, one), DomainError);
}

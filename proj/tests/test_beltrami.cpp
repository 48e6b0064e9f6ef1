#include <gtest/gtest.h>

#include "bnn/beltrami.hpp"

using namespace bnn;

namespace {

const Rectangle kSquare = Rectangle::square(1.0);

BeltramiOptions manufactured() {
  BeltramiOptions o;
  o.require_support = false;
  o.require_flat = false;
  return o;
}

BeltramiSolution solve_bump(double amplitude, int n, BeltramiOptions o = {}) {
  return beurling_iterate(BeltramiProblem::sample(flat_bump_coefficient(amplitude, 0.75), n, kSquare), o);
}

// Gaussian, below 1e-15 in the boundary margin of the square.
ScalarField bump() {
  return {Rectangle::plane(), [](const Jet& x, const Jet& y) {
            return exp(-(x * x + y * y) / (2.0 * 0.1 * 0.1)) * (1.0 + 0.5 * x - I * y);
          }};
}

TEST(CauchyTransform, Zero) {
  const GridField f(64, 64, kSquare, true, true);
  EXPECT_EQ(cauchy_transform(f).max_abs(), 0.0);
}

TEST(CauchyTransform, RejectsSupportTouchingTheBoundary) {
  const ScalarField wide = ScalarField::constant(1.0);
  EXPECT_THROW(cauchy_transform(GridField::sample(wide, 64, 64, kSquare, true, true)), PreconditionError);
  EXPECT_THROW(cauchy_transform(GridField(64, 64, kSquare, false)), std::invalid_argument);
}

TEST(CauchyTransform, InvertsDzbarOfARapidlyDecayingFunction) {
  const ScalarField phi = bump();
  const ScalarField rhs = 0.5 * (phi.derivative_x() + I * phi.derivative_y());
  const GridField f = GridField::sample(rhs, 256, 256, kSquare, true, true);
  const GridField out = cauchy_transform(f);
  // out - phi is holomorphic and doubly periodic, hence constant.
  const cplx c0 = out(128, 128) - phi(out.node(128, 128));
  double worst = 0.0;
  for (int i = 0; i < 256; ++i)
    for (int j = 0; j < 256; ++j) worst = std::max(worst, std::abs(out(i, j) - phi(out.node(i, j)) - c0));
  EXPECT_LE(worst, 1e-8);
  // Equation residual on the inner half, by spectral-accurate interpolation.
  const ScalarField of = out.to_field();
  for (const auto& p : random_points(kSquare.scaled(0.5), 100, 1)) {
    const cplx dzbar = 0.5 * (of.dx(p) + I * of.dy(p));
    EXPECT_LE(std::abs(dzbar - rhs(p)), 1e-6);
  }
}

TEST(NormalizeSolution, AffineMapsBecomeZ) {
  const GridField h = GridField::sample(
      {Rectangle::plane(), [](const Jet& x, const Jet& y) { return 2.0 * (x + I * y) + 3.0; }}, 65, 65, kSquare,
      false);
  const GridField n = normalize_solution(h);
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < 65; ++j) {
      const Point p = n.node(i, j);
      EXPECT_NEAR(std::abs(n(i, j) - cplx(p.x, p.y)), 0.0, 1e-14);
    }
  const GridField id = GridField::sample({Rectangle::plane(), [](const Jet& x, const Jet& y) { return x + I * y; }},
                                         65, 65, kSquare, false);
  const GridField nid = normalize_solution(id);
  for (std::size_t k = 0; k < id.values().size(); ++k) EXPECT_NEAR(std::abs(nid.values()[k] - id.values()[k]), 0.0, 1e-15);
}

TEST(NormalizeSolution, QuadraticPerturbation) {
  const ScalarField f(Rectangle::plane(), [](const Jet& x, const Jet& y) {
    const Jet z = x + I * y;
    return z + 0.1 * z * z - 0.05;
  });
  const GridField n = normalize_solution(GridField::sample(f, 65, 65, kSquare, false));
  const ScalarField nf = n.to_field();
  EXPECT_NEAR(std::abs(n(32, 32)), 0.0, 1e-15);
  const double h = 1e-3;
  const cplx fd = (nf(h, 0.0) - nf(-h, 0.0)) / (2 * h);
  EXPECT_NEAR(std::abs(fd - 1.0), 0.0, 1e-9);
}

TEST(NormalizeSolution, DegenerateThrows) {
  const GridField c = GridField::sample(ScalarField::constant(2.0), 33, 33, kSquare, false);
  EXPECT_THROW(normalize_solution(c), DegenerateError);
}

TEST(BeurlingIterate, ZeroCoefficientGivesIdentity) {
  const auto sol = beurling_iterate(BeltramiProblem::sample(ScalarField::zero(), 64, kSquare));
  EXPECT_LE(sol.iterations, 1);
  EXPECT_TRUE(sol.converged);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const Point p = sol.h.node(i, j);
      EXPECT_EQ(sol.h(i, j), cplx(p.x, p.y));
    }
}

TEST(BeurlingIterate, ConstantCoefficientBothSigns) {
  for (double c : {0.2, -0.2}) {
    const auto sol = beurling_iterate(BeltramiProblem::sample(ScalarField::constant(c), 128, kSquare), manufactured());
    EXPECT_TRUE(sol.converged) << c;
    double worst = 0.0;
    for (int i = 0; i < 128; ++i)
      for (int j = 0; j < 128; ++j) {
        const Point p = sol.h.node(i, j);
        const cplx z(p.x, p.y);
        worst = std::max(worst, std::abs(sol.h(i, j) - (z + c * std::conj(z)) / (1.0 + c)));
      }
    EXPECT_LE(worst, 1e-6) << c;
  }
}

TEST(BeurlingIterate, EllipticityAndPreconditions) {
  EXPECT_THROW(BeltramiProblem::sample(ScalarField::constant(1.0), 64, kSquare), EllipticityError);
  EXPECT_THROW(BeltramiProblem::sample(ScalarField::constant(-1.5), 64, kSquare), EllipticityError);
  // A constant coefficient violates the support and flatness assumptions.
  const auto p = BeltramiProblem::sample(ScalarField::constant(0.2), 64, kSquare);
  EXPECT_THROW(beurling_iterate(p), PreconditionError);
  BeltramiOptions support_only;
  support_only.require_support = false;
  EXPECT_THROW(beurling_iterate(p, support_only), PreconditionError);
}

TEST(BeurlingIterate, FlatBumpConvergesWithNormalization) {
  const auto sol = solve_bump(0.1, 256);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.residual.max_abs, 1e-6);
  const Jet j = sol.field().jet_at({0.0, 0.0}, 1);
  EXPECT_NEAR(std::abs(j.value()), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(j(1, 0) - 1.0), 0.0, 1e-8);
  // The field view agrees with the stored nodes.
  for (int i = 0; i < 256; i += 17)
    for (int j2 = 0; j2 < 256; j2 += 13) EXPECT_NEAR(std::abs(sol.field()(sol.h.node(i, j2)) - sol.h(i, j2)), 0.0, 1e-12);
}

TEST(BeurlingIterate, ContractionMatchesSupNu) {
  const auto problem = BeltramiProblem::sample(flat_bump_coefficient(0.1, 0.75), 256, kSquare);
  const auto sol = beurling_iterate(problem);
  const auto ratios = contraction_ratios(sol);
  ASSERT_FALSE(ratios.empty());
  for (double r : ratios) EXPECT_LE(r, problem.sup_nu + 1e-2);
}

TEST(BeurlingIterate, HalvingAmplitudeAtLeastHalvesTheResidual) {
  BeltramiOptions o;
  o.max_iter = 2;
  o.tol = 1e-300;
  const double r1 = solve_bump(0.4, 128, o).residual.max_abs;
  const double r2 = solve_bump(0.2, 128, o).residual.max_abs;
  EXPECT_GT(r1, 0.0);
  EXPECT_LE(r2, 0.5 * r1);
}

TEST(BeurlingIterate, GridRefinementConsistency) {
  const auto coarse = solve_bump(0.1, 128);
  const auto fine = solve_bump(0.1, 256);
  double worst = 0.0;
  for (int i = 0; i < 128; ++i)
    for (int j = 0; j < 128; ++j) worst = std::max(worst, std::abs(coarse.h(i, j) - fine.h(2 * i, 2 * j)));
  EXPECT_LE(worst, 1e-4);
}

TEST(BeurlingIterate, Deterministic) {
  const auto a = solve_bump(0.1, 128);
  const auto b = solve_bump(0.1, 128);
  EXPECT_EQ(a.h.values(), b.h.values());
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.residual.max_abs, b.residual.max_abs);
}

TEST(BeurlingIterate, NonConvergenceIsReported) {
  BeltramiOptions o;
  o.max_iter = 1;
  o.tol = 1e-14;
  const auto sol = solve_bump(0.1, 128, o);
  EXPECT_FALSE(sol.converged);
  EXPECT_GT(sol.residual.max_abs, 1e-14);
  EXPECT_EQ(sol.iterations, 1);
}

}  // namespace

#include <gtest/gtest.h>

#include <numbers>

#include "bnn/polar.hpp"

using namespace bnn;
using namespace bnn::frames;

namespace {

constexpr double kPi = std::numbers::pi;
const ScalarField kX = ScalarField::coord_x();
const ScalarField kY = ScalarField::coord_y();

ScalarField flat_x() {
  return {Rectangle::plane(), [](const Jet& x, const Jet&) { return flat_exp(x); }};
}

ScalarField gauss_flat(double amplitude = 1.0) {
  return make_flat_field(amplitude, FlatProfile::gauss_flat, Rectangle::square(2.0));
}

TEST(PolarMap, SigmaInvarianceAndInjectivity) {
  const CoordMap g = polar_map();
  for (const auto& p : random_points(Rectangle(-2.0, 2.0, -5.0, 5.0), 100, 1)) {
    const Point a = g(p), b = g(sigma(p));
    EXPECT_NEAR(a.x, b.x, 1e-14);
    EXPECT_NEAR(a.y, b.y, 1e-14);
  }
  const auto pts = random_points_off_axis(0.05, 2.0, kPi / 2 - 1e-3, 60, 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point a = g(pts[i]), b = g(pts[j]);
      EXPECT_GT(std::hypot(a.x - b.x, a.y - b.y), 0.0);
    }
  EXPECT_EQ(g({0.0, 1.3}).x, 0.0);
  EXPECT_EQ(g({0.0, 1.3}).y, 0.0);
}

TEST(PolarMap, PushforwardIdentities) {
  const auto tests = polynomial_tests();
  const auto pts = random_points_off_axis(0.05, 2.0, 3.0, 200, 3);
  const CoordMap g = polar_map();
  EXPECT_LE(relatedness_residual(g, x_d_x(), {kX, kY}, tests, pts).max_abs, 1e-9);
  EXPECT_LE(relatedness_residual(g, d_y(), {-1.0 * kY, kX}, tests, pts).max_abs, 1e-9);
  EXPECT_LE(relatedness_residual(g, b_d_zbar(), zbar() * d_zbar(), tests, pts).max_abs, 1e-9);
  EXPECT_LE(relatedness_residual(g, b_d_z(), z() * d_z(), tests, pts).max_abs, 1e-9);
  // The reversed orientation fails them.
  EXPECT_GT(relatedness_residual(polar_map(-1), b_d_zbar(), zbar() * d_zbar(), tests, pts).max_abs, 0.1);
}

TEST(Periodize, ZeroAndArgumentErrors) {
  const auto p = periodize(ScalarField::zero(), 0.1);
  for (const auto& q : random_points(Rectangle(-2, 2, -7, 7), 50, 4)) EXPECT_EQ(p.field()(q), 0.0);
  EXPECT_THROW(periodize(ScalarField::zero(), kPi / 4), std::invalid_argument);
  EXPECT_THROW(periodize(ScalarField::zero(), 0.0), std::invalid_argument);
}

TEST(Periodize, AgreesWithInputOnThePlateauAndIsSigmaInvariant) {
  const double w = 0.25;
  const ScalarField gamma = gauss_flat() * (1.0 + 0.3 * kY);
  const auto p = periodize(gamma, w);
  EXPECT_LE(p.certificate(), 1e-10);
  for (const auto& q : random_points(Rectangle(-1.5, 1.5, -(kPi / 2 - 2 * w), kPi / 2 - 2 * w), 100, 5)) {
    EXPECT_NEAR(std::abs(p.field()(q) - gamma(q)), 0.0, 1e-15);
  }
  // Section independence: (x, y) and (-x, y + pi) agree, derivatives too.
  for (const auto& q : random_points(Rectangle(-1.5, 1.5, -4.0, 4.0), 100, 6)) {
    const Jet a = p.field().jet_at(q, 2), b = p.field().jet_at(sigma(q), 2);
    EXPECT_NEAR(std::abs(a.value() - b.value()), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(a(1, 0) + b(1, 0)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(a(0, 1) - b(0, 1)), 0.0, 1e-10);
  }
  // Outside the cutoff support the output vanishes.
  EXPECT_EQ(p.field()(0.7, kPi / 2 - 0.5 * w), 0.0);
}

TEST(SigmaInvariantField, RejectsNonInvariantFields) {
  EXPECT_THROW(SigmaInvariantField::certify(kX * kX * kX), PreconditionError);
  EXPECT_NO_THROW(SigmaInvariantField::certify(flat_x()));
}

TEST(PushforwardFlatFunction, GaussianDescends) {
  const ScalarField out = pushforward_flat_function(SigmaInvariantField::certify(flat_x()));
  for (const auto& q : random_points(Rectangle::square(1.5), 100, 7)) {
    const double r2 = q.x * q.x + q.y * q.y;
    EXPECT_NEAR(std::abs(out(q) - std::exp(-1.0 / r2)), 0.0, 1e-15);
  }
  const ScalarField zero = pushforward_flat_function(SigmaInvariantField::certify(ScalarField::zero()));
  EXPECT_EQ(zero(0.3, 0.4), 0.0);
}

TEST(PushforwardFlatFunction, FlatAtOrigin) {
  const ScalarField out = pushforward_flat_function(periodize(gauss_flat(), 0.25));
  const double h = 0.05;
  for (int order = 1; order <= 4; ++order) {
    for (auto dir : {Point{1, 0}, Point{0, 1}, Point{0.6, 0.8}}) {
      double sum = 0.0, binom = 1.0;
      for (int k = 0; k <= order; ++k) {
        const double t = (k - order / 2.0) * h;
        sum += ((k % 2 == 0) ? 1.0 : -1.0) * binom * std::abs(out(t * dir.x, t * dir.y));
        binom = binom * (order - k) / (k + 1);
      }
      EXPECT_LE(std::abs(sum) / std::pow(h, order), 1e-8);
    }
  }
}

TEST(PushforwardBFrame, UndeformedIsZbarDzbar) {
  const VectorField v = pushforward_b_frame(SigmaInvariantField::certify(ScalarField::zero()));
  for (const auto& q : random_points(Rectangle::square(2.0), 50, 8)) {
    const cplx zb(q.x, -q.y);
    EXPECT_NEAR(std::abs(v.alpha(q) - zb / 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.beta(q) - I * zb / 2.0), 0.0, 1e-15);
  }
}

TEST(PushforwardBFrame, DeformedFrameIsRelatedThroughG) {
  const auto periodic = periodize(gauss_flat(0.3), 0.25);
  const BFrame l(periodic.field());
  const VectorField pushed = pushforward_b_frame(periodic);
  const auto tests = polynomial_tests();
  // Both sheets of the double cover, including y beyond the fundamental strip.
  const auto pts = random_points_off_axis(0.1, 1.8, 4.0, 200, 9);
  EXPECT_LE(relatedness_residual(polar_map(), l.realize(), pushed, tests, pts).max_abs, 1e-9);
}

TEST(DivideByZbar, ExactFactorization) {
  const ScalarField e = pushforward_flat_function(SigmaInvariantField::certify(flat_x()));
  const ScalarField gamma = zbar() * e;
  const ScalarField q = divide_by_zbar(gamma);
  for (const auto& p : random_points(Rectangle::square(1.5), 200, 10)) {
    if (std::hypot(p.x, p.y) < kDivisionCutoff) continue;
    EXPECT_NEAR(std::abs(q(p) - e(p)), 0.0, 1e-15);
  }
  EXPECT_EQ(divide_by_zbar(ScalarField::zero())(0.2, 0.1), 0.0);
  EXPECT_THROW(divide_by_zbar(zbar()), PreconditionError);
}

TEST(DivideByZbar, MultiplyingBackReproducesTheInput) {
  const ScalarField gamma = pushforward_flat_function(periodize(gauss_flat(), 0.25)) * (1.0 + z() * z());
  const ScalarField back = zbar() * divide_by_zbar(gamma);
  for (const auto& p : random_points(Rectangle::square(1.5), 200, 11)) {
    if (std::hypot(p.x, p.y) < 0.05) continue;
    EXPECT_NEAR(std::abs(back(p) - gamma(p)), 0.0, 1e-10);
  }
}

// ---------------------------------------------------------------------------
// R^{2n+2}

GeneralVectorField single(int n, int slot, ScalarField c) {
  GeneralVectorField v = GeneralVectorField::zero(n);
  Monomial m;
  m.powers.assign(n, {0, 0});
  v.slots[slot].push_back({std::move(c), m});
  return v;
}

std::vector<GeneralTest> tests_n1() {
  auto z = [](std::span<const double> q, int j) { return cplx(q[2 * j], q[2 * j + 1]); };
  return {
      [z](std::span<const double> q) { return z(q, 0); },
      [z](std::span<const double> q) { return std::conj(z(q, 0)) * z(q, 1); },
      [z](std::span<const double> q) { return z(q, 0) * z(q, 0) + std::conj(z(q, 1)); },
      [z](std::span<const double> q) { return z(q, 1) * z(q, 1) * std::conj(z(q, 0)); },
  };
}

std::vector<std::vector<double>> samples_n1(std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  const auto head = random_points_off_axis(0.1, 1.5, 3.0, count, seed);
  const auto tail = random_points(Rectangle::square(1.0), count, seed + 1);
  for (std::size_t k = 0; k < count; ++k) out.push_back({head[k].x, head[k].y, tail[k].x, tail[k].y});
  return out;
}

TEST(PushforwardGeneral, CoefficientsDescend) {
  const auto in = single(1, 2, flat_x());
  const auto out = pushforward_general(std::span<const GeneralVectorField>(&in, 1), 1);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].slots[2].size(), 1u);
  for (const auto& p : random_points(Rectangle::square(1.0), 20, 12)) {
    const double r2 = p.x * p.x + p.y * p.y;
    EXPECT_NEAR(std::abs(out[0].slots[2][0].c(p) - std::exp(-1.0 / r2)), 0.0, 1e-15);
  }
  const auto zero = GeneralVectorField::zero(1);
  const auto out0 = pushforward_general(std::span<const GeneralVectorField>(&zero, 1), 1);
  for (const auto& s : out0[0].slots) EXPECT_TRUE(s.empty());
  EXPECT_THROW(pushforward_general(std::span<const GeneralVectorField>(&in, 1), 2), std::invalid_argument);
  const auto bad = single(1, 0, kY);
  EXPECT_THROW(pushforward_general(std::span<const GeneralVectorField>(&bad, 1), 1), PreconditionError);
}

TEST(PushforwardGeneral, FiniteDifferenceRelatednessN1) {
  const ScalarField gamma = periodize(gauss_flat(), 0.25).field();
  std::vector<GeneralVectorField> fields{single(1, 2, flat_x()), single(1, 0, gamma), single(1, 1, gamma)};
  // A term with a nontrivial monomial in z_1.
  GeneralVectorField mixed = GeneralVectorField::zero(1);
  mixed.slots[3].push_back({gamma, Monomial{0.5, {{2, 1}}}});
  fields.push_back(mixed);
  const auto pushed = pushforward_general(fields, 1);
  const auto tests = tests_n1();
  const auto samples = samples_n1(50, 13);
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const Residual r = relatedness_residual_fd(polar_map_general, fields[k], pushed[k], tests, samples);
    EXPECT_LE(r.max_abs, 1e-7) << "field " << k;
  }
  // Swapping the target slot is detected.
  GeneralVectorField wrong = pushed[0];
  std::swap(wrong.slots[2], wrong.slots[3]);
  EXPECT_GT(relatedness_residual_fd(polar_map_general, fields[0], wrong, tests, samples).max_abs, 1e-3);
}

}  // namespace

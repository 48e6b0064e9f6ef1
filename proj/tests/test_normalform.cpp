#include <gtest/gtest.h>

#include <numbers>

#include "bnn/normalform.hpp"

using namespace bnn;
using namespace bnn::frames;

namespace {

constexpr double kPi = std::numbers::pi;
const ScalarField kX = ScalarField::coord_x();
const ScalarField kY = ScalarField::coord_y();

VectorField tanex() { return {0.5 * (kX - I * kX * kY), 0.5 * I * (ScalarField::constant(1.0) + kY * kY)}; }

TEST(ModelG, Examples) {
  const CoordMap G = model_G();
  const Point a = G({1.0, 0.0});
  EXPECT_DOUBLE_EQ(a.x, 1.0);
  EXPECT_DOUBLE_EQ(a.y, 0.0);
  const Point b = G({2.0, kPi / 4});
  EXPECT_NEAR(b.x, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b.y, 1.0, 1e-15);
  EXPECT_THROW(G({0.0, 1.6}), DomainError);
  ASSERT_TRUE(G.has_inverse());
  const CoordMap Gi = model_G_inverse();
  for (const auto& p : random_points(Rectangle(-3.0, 3.0, -1.5, 1.5), 200, 1)) {
    const Point q = Gi(G(p));
    EXPECT_NEAR(q.x, p.x, 1e-10);
    EXPECT_NEAR(q.y, p.y, 1e-10);
  }
}

TEST(Kappa, Examples) {
  EXPECT_EQ(kappa({2.0, 3.0}).x, 2.0);
  EXPECT_EQ(kappa({2.0, 3.0}).y, 6.0);
  EXPECT_EQ(kappa({0.0, 5.0}).y, 0.0);
  const std::vector<double> p{2.0, 3.0, 0.5, -1.0};
  EXPECT_EQ(kappa_tilde(p), (std::vector<double>{2.0, 6.0, 0.5, -1.0}));
  EXPECT_FALSE(kappa_map().has_inverse());
  EXPECT_TRUE(kappa_map(Rectangle(0.1, 2.0, -1.0, 1.0)).has_inverse());
}

TEST(Kappa, FactorsThePolarMap) {
  const CoordMap G = model_G();
  for (const auto& p : random_points(Rectangle(-2.0, 2.0, -1.5, 1.5), 200, 2)) {
    const Point k = kappa(G(p));
    EXPECT_NEAR(k.x, p.x * std::cos(p.y), 1e-10);
    EXPECT_NEAR(k.y, p.x * std::sin(p.y), 1e-10);
  }
}

TEST(PushforwardByCoordmap, IdentityAndMissingInverse) {
  const VectorField v{kX * kY, kY + 2.0};
  const VectorField w = pushforward_by_coordmap(CoordMap::identity(), v);
  for (const auto& p : random_points(Rectangle::square(1.0), 20, 3)) {
    EXPECT_EQ(w.alpha(p), v.alpha(p));
    EXPECT_EQ(w.beta(p), v.beta(p));
  }
  EXPECT_THROW(pushforward_by_coordmap(kappa_map(), v), std::invalid_argument);
}

TEST(PushforwardByCoordmap, ModelMapGivesTheTangentFrame) {
  const VectorField pushed = pushforward_by_coordmap(model_G(), b_d_zbar());
  // Target points G(p) with p off the strip.
  std::vector<Point> targets;
  for (const auto& p : random_points_off_axis(0.1, 1.5, 1.2, 100, 4)) targets.push_back(model_G()(p));
  const VectorField l = tanex();
  for (const auto& q : targets) {
    EXPECT_NEAR(std::abs(pushed.alpha(q) - l.alpha(q)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(pushed.beta(q) - l.beta(q)), 0.0, 1e-9);
  }
  EXPECT_LE(colinearity_residual(pushed, l, targets).max_abs, 1e-9);
}

TEST(PushforwardByCoordmap, KappaPathIsConsistentWithThePolarMap) {
  const auto tests = polynomial_tests();
  const Rectangle right(0.1, 2.0, -1.3, 1.3);
  const auto pts = random_points(right, 100, 5);
  // kappa_* of b-d_zbar, written in the target coordinates (u, v) = (x, x y).
  const VectorField kb{0.5 * kX, 0.5 * (kY + I * kX)};
  EXPECT_LE(relatedness_residual(kappa_map(right), b_d_zbar(), kb, tests, pts).max_abs, 1e-9);
  // g = kappa o G, so kappa_* takes the tangent frame to zbar d_zbar.
  std::vector<Point> gp;
  for (const auto& p : pts) gp.push_back(model_G()(p));
  const VectorField via_kappa = pushforward_by_coordmap(kappa_map(Rectangle(0.05, 3.0, -5.0, 5.0)), tanex());
  for (const auto& p : pts) {
    const Point q = polar_map()(p);
    EXPECT_LE(colinearity(via_kappa(q), (zbar() * d_zbar())(q)), 1e-9);
  }
  EXPECT_LE(relatedness_residual(compose(kappa_map(), model_G()), b_d_zbar(), zbar() * d_zbar(), tests, pts).max_abs,
            1e-9);
}

TEST(BuildF, PolarMapGivesG) {
  const BuiltF b = build_F(polar_function());
  EXPECT_EQ(b.halvings, 0);
  const CoordMap G = model_G();
  for (const auto& p : random_points(b.domain, 100, 6)) {
    const Point a = b.F(p), e = G(p);
    EXPECT_NEAR(a.x, e.x, 1e-10);
    EXPECT_NEAR(a.y, e.y, 1e-10);
  }
  const Matrix2 j = b.F.jacobian({0.0, 0.0});
  EXPECT_NEAR(j[0][0], 1.0, 1e-6);
  EXPECT_NEAR(j[0][1], 0.0, 1e-6);
  EXPECT_NEAR(j[1][1], 1.0, 1e-6);
}

TEST(BuildF, TangentExampleGivesIdentity) {
  const BuiltF b = build_F(kX + I * kX * kY);
  for (const auto& p : random_points(b.domain, 100, 7)) {
    const Point a = b.F(p);
    EXPECT_NEAR(a.x, p.x, 1e-12);
    EXPECT_NEAR(a.y, p.y, 1e-12);
  }
  // Z goes to Z, and the inverse is attached.
  for (double y : {-1.0, 0.0, 0.7}) EXPECT_EQ(b.F({0.0, y}).x, 0.0);
  ASSERT_TRUE(b.F.has_inverse());
  const Point back = b.F.inverse()(b.F({0.3, -0.4}));
  EXPECT_NEAR(back.x, 0.3, 1e-10);
  EXPECT_NEAR(back.y, -0.4, 1e-10);
}

TEST(BuildF, JacobianAtOriginHasTheClaimedShape) {
  // b-holomorphic: h o g with h(z) = z + 0.3 z^2 + 0.1i z^3
  const ScalarField g = polar_function();
  const BuiltF b = build_F(g + 0.3 * g * g + 0.1 * I * g * g * g);
  const Matrix2 j = b.F.jacobian({0.0, 0.0});
  EXPECT_NEAR(j[0][0], 1.0, 1e-6);
  EXPECT_NEAR(j[0][1], 0.0, 1e-6);
  EXPECT_NEAR(j[1][1], 1.0, 1e-6);
}

TEST(BuildF, ShrinksUntilTheQuotientIsNonvanishing) {
  // a = 1 - 2 y^2 vanishes at |y| = 0.707; one halving clears it.
  const BuiltF b = build_F(kX * (1.0 - 2.0 * kY * kY) + I * kX * kY);
  EXPECT_EQ(b.halvings, 1);
  EXPECT_EQ(b.domain, Rectangle(-0.5, 0.5, -0.6, 0.6));
}

TEST(BuildF, Preconditions) {
  EXPECT_THROW(build_F(kX + 1.0), PreconditionError);
  EXPECT_THROW(build_F(2.0 * polar_function()), PreconditionError);
  // Without halvings the vanishing quotient cannot be avoided.
  BuildFOptions o;
  o.max_halvings = 0;
  EXPECT_THROW(build_F(kX * (1.0 - 2.0 * kY * kY) + I * kX * kY, o), PipelineError);
}

TEST(Normalize, ZeroDeformationIsIdentity) {
  const NormalForm nf = normalize_bstructure(BFrame::standard());
  double worst = 0.0;
  for (const auto& p : random_points(nf.report.domain_used, 200, 8)) {
    const Point q = nf.phi(p);
    worst = std::max({worst, std::abs(q.x - p.x), std::abs(q.y - p.y)});
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_EQ(nf.report.iterations, 0);
  EXPECT_TRUE(accepted(nf.report, {}));
}

TEST(Normalize, ZeroAmplitudeIsBitIdenticalToTheUndeformedCase) {
  const NormalForm a = normalize_bstructure(BFrame::standard());
  const NormalForm b =
      normalize_bstructure(BFrame(make_flat_field(0.0, FlatProfile::gauss_flat, Rectangle::square(2.0))));
  EXPECT_EQ(a.solution.h.values(), b.solution.h.values());
  EXPECT_EQ(a.report.colinearity.max_abs, b.report.colinearity.max_abs);
  EXPECT_EQ(a.report.bholo.max_abs, b.report.bholo.max_abs);
  for (const auto& p : random_points(a.report.domain_used, 50, 9)) {
    EXPECT_EQ(a.phi(p).x, b.phi(p).x);
    EXPECT_EQ(a.phi(p).y, b.phi(p).y);
  }
}

class NormalizeGauss : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    gamma_ = new ScalarField(make_flat_field(0.1, FlatProfile::gauss_flat, Rectangle::square(2.0)));
    result_ = new NormalForm(normalize_bstructure(BFrame(*gamma_)));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete gamma_;
  }
  static ScalarField* gamma_;
  static NormalForm* result_;
};
ScalarField* NormalizeGauss::gamma_ = nullptr;
NormalForm* NormalizeGauss::result_ = nullptr;

TEST_F(NormalizeGauss, CertificatesPass) {
  const NormalFormReport& r = result_->report;
  EXPECT_LE(r.colinearity.max_abs, 1e-4);
  EXPECT_GT(r.colinearity.n_samples, 100u);
  EXPECT_LE(r.bholo.max_abs, 1e-6);
  EXPECT_LE(r.jacobian_defect(), 1e-6);
  EXPECT_LE(r.z_defect, 1e-8);
  EXPECT_LE(r.frame_relatedness.max_abs, 1e-9);
  EXPECT_LT(r.sup_nu, 1.0);
  EXPECT_GT(r.iterations, 0);
  EXPECT_TRUE(accepted(r, {}));
}

TEST_F(NormalizeGauss, CertificateIsNotVacuous) {
  // The raw frame is measurably far from b-d_zbar on the same samples.
  const NormalFormReport& r = result_->report;
  const VectorField lv = BFrame(*gamma_).realize();
  Residual raw;
  for (const auto& p : random_points(r.domain_used, 400, 1, 0.05)) {
    raw.record(colinearity(lv(p), b_d_zbar()(p)), p);
  }
  EXPECT_GT(raw.max_abs, 1e3 * r.colinearity.max_abs);
  // And f = h o g is b-holomorphic while g alone is not.
  const auto samples = random_points(r.domain_used, 200, 2, 0.05);
  EXPECT_GT(bholo_residual(lv, polar_function(), samples).max_abs, 1e3 * r.bholo.max_abs);
}

TEST_F(NormalizeGauss, PhiPreservesTheSingularLocusAndOrigin) {
  const Point o = result_->phi({0.0, 0.0});
  EXPECT_NEAR(o.x, 0.0, 1e-12);
  EXPECT_NEAR(o.y, 0.0, 1e-12);
  for (double y = -0.6; y <= 0.6; y += 0.05) EXPECT_LE(std::abs(result_->phi({0.0, y}).x), 1e-8);
}

TEST_F(NormalizeGauss, PhiPullsBDzbarBackToTheFrame) {
  // Phi_* L is parallel to b-d_zbar: check directly via the pushforward field.
  const VectorField pushed = pushforward_by_coordmap(result_->phi, BFrame(*gamma_).realize());
  std::vector<Point> targets;
  for (const auto& p : random_points(result_->report.domain_used.scaled(0.8), 50, 3, 0.1)) {
    targets.push_back(result_->phi(p));
  }
  EXPECT_LE(colinearity_residual(pushed, b_d_zbar(), targets).max_abs, 1e-4);
}

TEST(Normalize, StrongDeformationFailsInTheBeltramiStage) {
  try {
    normalize_bstructure(BFrame(make_flat_field(5.0, FlatProfile::gauss_flat, Rectangle::square(2.0))));
    FAIL() << "expected a pipeline error";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "beltrami");
    EXPECT_NE(std::string(e.what()).find("ellipticity"), std::string::npos);
  }
}

TEST(Normalize, NonConvergenceIsAPipelineError) {
  NormalizeConfig c;
  c.max_iter = 1;
  c.tol = 1e-14;
  try {
    normalize_bstructure(BFrame(make_flat_field(0.1, FlatProfile::gauss_flat, Rectangle::square(2.0))), c);
    FAIL() << "expected a pipeline error";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "beltrami");
  }
}

}  // namespace

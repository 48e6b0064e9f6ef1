#pragma once

/**
 * @file normalform.hpp
 * @brief Normal form coordinates for a deformed two-dimensional b-frame.
 *
 * Given L = bd_zbar + gamma bd_z with gamma flat on {x = 0}, the pipeline
 * produces a b-holomorphic f = h o g with f = 0 on the axis and
 * d_x f(0, 0) = 1, splits f = u + i v = x (a + i b), sets
 * F = (u, b / a) and returns Phi = G^{-1} o F, where G(x, y) = (x cos y, tan y)
 * is the same construction applied to g itself. Phi pushes L to a multiple
 * of bd_zbar.
 */

#include <numbers>

#include "bnn/beltrami.hpp"
#include "bnn/polar.hpp"

namespace bnn {

/// G(x, y) = (x cos y, tan y) on R x (-pi/2 + delta, pi/2 - delta), with
/// G^{-1}(u, w) = (u sqrt(1 + w^2), arctan w) attached.
inline CoordMap model_G_inverse() {
  return {Rectangle::plane(), [](const Jet& u, const Jet& w) {
            return CoordMap::JetPair{u * sqrt(1.0 + w * w), atan(w).real()};
          }};
}

inline CoordMap model_G(double delta = 1e-6) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double h = std::numbers::pi / 2 - delta;
  CoordMap g(Rectangle(-inf, inf, -h, h),
             [](const Jet& x, const Jet& y) { return CoordMap::JetPair{x * cos(y), tan(y)}; });
  return g.with_inverse(model_G_inverse());
}

/// kappa(x, y) = (x, x y).
inline Point kappa(const Point& p) { return {p.x, p.x * p.y}; }

/// kappa x id on R^{2n+2}.
inline std::vector<double> kappa_tilde(std::span<const double> p) {
  std::vector<double> q(p.begin(), p.end());
  q[1] = p[0] * p[1];
  return q;
}

/// kappa as a map; on domains avoiding x = 0 the inverse (x, y / x) is attached.
inline CoordMap kappa_map(const Rectangle& domain = Rectangle::plane()) {
  CoordMap k(domain, [](const Jet& x, const Jet& y) { return CoordMap::JetPair{x, x * y}; });
  if (domain.x_min() > 0.0 || domain.x_max() < 0.0) {
    k = k.with_inverse(CoordMap(Rectangle::plane(), [](const Jet& x, const Jet& y) {
      return CoordMap::JetPair{x, y / x};
    }));
  }
  return k;
}

/// theta_* V = (J_theta (alpha, beta)) o theta^{-1}.
inline VectorField pushforward_by_coordmap(const CoordMap& theta, const VectorField& v) {
  if (!theta.has_inverse()) throw std::invalid_argument("pushforward_by_coordmap: map has no inverse");
  const ScalarField t0 = theta.component(0), t1 = theta.component(1);
  const ScalarField a = t0.derivative_x() * v.alpha + t0.derivative_y() * v.beta;
  const ScalarField b = t1.derivative_x() * v.alpha + t1.derivative_y() * v.beta;
  return {pullback(a, theta.inverse()), pullback(b, theta.inverse())};
}

/// theta_* V at theta(p), computed at the source point.
inline std::array<cplx, 2> pushforward_at(const CoordMap& theta, const VectorField& v, const Point& p) {
  const Matrix2 j = theta.jacobian(p);
  const auto c = v(p);
  return {j[0][0] * c[0] + j[0][1] * c[1], j[1][0] * c[0] + j[1][1] * c[1]};
}

struct BuildFOptions {
  Rectangle start = Rectangle(-1.0, 1.0, -1.2, 1.2);
  int max_halvings = 6;
  /// Lower bound for |a| and for det J_F / det J_F(0) on the working rectangle.
  double min_quotient = 1e-2;
  int check_grid = 17;
  /// Extra admissibility test for candidate rectangles (e.g. localization).
  std::function<bool(const Rectangle&)> admissible;
};

struct BuiltF {
  CoordMap F;
  Rectangle domain;
  ScalarField quotient;  // a + i b = f / x
  int halvings = 0;
};

/**
 * F = (u, b / a) for f = u + i v = x (a + i b). The working rectangle is
 * halved about the origin until a and det J_F stay away from zero on a
 * check grid.
 */
inline BuiltF build_F(const ScalarField& f, const BuildFOptions& opts = {}) {
  const Rectangle dom0 = f.domain().intersect(opts.start);
  if (!vanishes_on_axis(ScalarField(dom0, [f](const Jet& x, const Jet& y) { return f.jet(x, y); }))) {
    throw PreconditionError("build_F: f does not vanish on x = 0");
  }
  const double ux0 = derive(f, Direction::x, {0.0, 0.0}).real();
  if (std::abs(ux0 - 1.0) > 0.1) throw PreconditionError("build_F: d_x Re f(0, 0) is not close to 1");

  const ScalarField quotient = hadamard_quotient(f);
  auto make = [f, quotient](const Rectangle& dom) {
    return CoordMap(dom, [f, quotient](const Jet& x, const Jet& y) {
      const Jet q = quotient.jet(x, y);
      return CoordMap::JetPair{f.jet(x, y).real(), (q.imag() / q.real()).real()};
    });
  };

  Rectangle rect = dom0;
  for (int halving = 0; halving <= opts.max_halvings; ++halving) {
    if (halving > 0) rect = rect.scaled(0.5);
    if (opts.admissible && !opts.admissible(rect)) continue;
    const CoordMap F = make(rect);
    const Matrix2 j0 = F.jacobian({0.0, 0.0});
    const double det0 = j0[0][0] * j0[1][1] - j0[0][1] * j0[1][0];
    bool ok = std::abs(det0) > 0.0;
    const int n = opts.check_grid;
    for (int i = 0; i < n && ok; ++i)
      for (int k = 0; k < n && ok; ++k) {
        const Point p{rect.x_min() + rect.width() * i / (n - 1), rect.y_min() + rect.height() * k / (n - 1)};
        const double a = quotient(p).real();
        const Matrix2 j = F.jacobian(p);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        ok = std::abs(a) >= opts.min_quotient && det / det0 >= opts.min_quotient;
      }
    if (!ok) continue;
    const CoordMap G = model_G();
    // F is a perturbation of G, so G^{-1} seeds the Newton inverse.
    const CoordMap Ginv = G.inverse();
    const Rectangle r = rect;
    auto guess = [Ginv, r](const Point& q) {
      const Point p = Ginv(q);
      return Point{std::clamp(p.x, r.x_min(), r.x_max()), std::clamp(p.y, r.y_min(), r.y_max())};
    };
    double u_lo = 0, u_hi = 0, w_lo = 0, w_hi = 0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const Point q = F({rect.x_min() + rect.width() * i / (n - 1), rect.y_min() + rect.height() * k / (n - 1)});
        u_lo = std::min(u_lo, q.x), u_hi = std::max(u_hi, q.x);
        w_lo = std::min(w_lo, q.y), w_hi = std::max(w_hi, q.y);
      }
    const CoordMap inv = newton_inverse(F, Rectangle(u_lo, u_hi, w_lo, w_hi), guess);
    return {F.with_inverse(inv), rect, quotient, halving};
  }
  throw PipelineError("build_F", "quotient a or det J_F vanishes on every candidate rectangle");
}

struct NormalizeConfig {
  int grid = 256;
  /// The Beltrami solve runs on [-w, w]^2 in the z-plane.
  double solver_half_width = 2.0;
  /// nu is cut off radially: unchanged for |z| <= inner, zero for |z| >= outer.
  double localize_inner = 1.2;
  double localize_outer = 1.6;
  double cutoff_width = 0.25;
  double tol = 1e-6;
  int max_iter = 200;
  double tol_accept = 1e-4;
  double bholo_accept = 1e-6;
  double strip = 0.05;
  Rectangle start = Rectangle(-1.0, 1.0, -1.2, 1.2);
  int max_halvings = 6;
  std::size_t n_samples = 400;
  std::uint64_t seed = 1;
};

struct NormalFormReport {
  Matrix2 jacobian_at_origin{};
  Residual colinearity;
  Residual bholo;
  /// Relatedness of the periodized frame to zbar d_zbar + g_*(gamma) z d_z through g.
  Residual frame_relatedness;
  /// max |x-component of Phi(0, y)|.
  double z_defect = 0.0;
  Rectangle domain_used = Rectangle(-1, 1, -1, 1);
  int iterations = 0;
  double sup_nu = 0.0;
  double beltrami_residual = 0.0;
  int halvings = 0;

  double jacobian_defect() const {
    const auto& j = jacobian_at_origin;
    return std::max({std::abs(j[0][0] - 1.0), std::abs(j[0][1]), std::abs(j[1][1] - 1.0)});
  }
};

struct NormalForm {
  CoordMap phi;
  NormalFormReport report;
  ScalarField f;
  CoordMap F;
  BeltramiSolution solution;
};

inline bool accepted(const NormalFormReport& r, const NormalizeConfig& c) {
  return r.colinearity.max_abs <= c.tol_accept && r.bholo.max_abs <= c.bholo_accept &&
         r.jacobian_defect() <= 1e-6 && r.z_defect <= 1e-8;
}

/// Radial cutoff 1 - step((|z|^2 - a^2) / (b^2 - a^2)).
inline ScalarField radial_cutoff(double inner, double outer) {
  return {Rectangle::plane(), [inner, outer](const Jet& x, const Jet& y) {
            const Jet r2 = x * x + y * y;
            return 1.0 - smooth_step((r2 - inner * inner) / (outer * outer - inner * inner));
          }};
}

inline NormalForm normalize_bstructure(const BFrame& l, const NormalizeConfig& cfg = {}) {
  constexpr double pi = std::numbers::pi;
  auto stage = [](const char* name, auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  };

  const SigmaInvariantField periodic = stage("periodize", [&] { return periodize(l.gamma(), cfg.cutoff_width); });
  const ScalarField pushed = stage("pushforward", [&] { return pushforward_flat_function(periodic); });
  const ScalarField divided = stage("divide", [&] { return divide_by_zbar(pushed); });
  const ScalarField nu = -1.0 * radial_cutoff(cfg.localize_inner, cfg.localize_outer) * divided * frames::z();

  const BeltramiProblem problem = stage("beltrami", [&] {
    return BeltramiProblem::sample(nu, cfg.grid, Rectangle::square(cfg.solver_half_width));
  });
  BeltramiSolution solution = stage("beltrami", [&] {
    return beurling_iterate(problem, {.max_iter = cfg.max_iter, .tol = cfg.tol});
  });
  if (!solution.converged) {
    throw PipelineError("beltrami", "no convergence: residual " + std::to_string(solution.residual.max_abs) +
                                        " after " + std::to_string(solution.iterations) + " iterations");
  }

  const ScalarField f = pullback(solution.field(), polar_map());

  // The deformation is only unchanged where every cutoff equals one.
  const double y_limit = pi / 2 - 2 * cfg.cutoff_width;
  const double x_limit = cfg.localize_inner;
  BuildFOptions bopts;
  bopts.start = cfg.start;
  bopts.max_halvings = cfg.max_halvings;
  bopts.admissible = [=](const Rectangle& r) {
    return std::max(std::abs(r.x_min()), std::abs(r.x_max())) <= x_limit &&
           std::max(std::abs(r.y_min()), std::abs(r.y_max())) <= y_limit;
  };
  const BuiltF built = stage("build_F", [&] { return build_F(f, bopts); });

  const CoordMap phi = compose(model_G_inverse().with_inverse(model_G()), built.F);

  NormalFormReport rep;
  rep.domain_used = built.domain;
  rep.halvings = built.halvings;
  rep.iterations = solution.iterations;
  rep.sup_nu = problem.sup_nu;
  rep.beltrami_residual = solution.residual.max_abs;
  stage("certify", [&] {
    rep.jacobian_at_origin = built.F.jacobian({0.0, 0.0});
    const VectorField lv = l.realize();
    const auto samples = random_points(built.domain, cfg.n_samples, cfg.seed, cfg.strip);
    for (const auto& p : samples) {
      const Point q = phi(p);
      if (std::abs(q.x) < cfg.strip) continue;
      rep.colinearity.record(colinearity(pushforward_at(phi, lv, p), {0.5 * q.x, 0.5 * I}), p);
    }
    rep.bholo = bholo_residual(lv, f, samples);
    for (int k = 0; k <= 32; ++k) {
      const double y = built.domain.y_min() + built.domain.height() * k / 32;
      rep.z_defect = std::max(rep.z_defect, std::abs(phi({0.0, y}).x));
    }
    const auto frame_samples = random_points(built.domain, 32, cfg.seed + 1, cfg.strip);
    const auto tests = polynomial_tests();
    rep.frame_relatedness =
        relatedness_residual(polar_map(), BFrame(periodic.field()).realize(), pushforward_b_frame(periodic), tests,
                             frame_samples);
    return 0;
  });

  return {phi, rep, f, built.F, std::move(solution)};
}

}  // namespace bnn

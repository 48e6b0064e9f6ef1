#pragma once

/**
 * @file commands.hpp
 * @brief The work behind each CLI subcommand, returning reports.
 */

#include <future>
#include <iomanip>
#include <ostream>

#include "bnn/config.hpp"
#include "bnn/flows.hpp"
#include "bnn/report.hpp"

namespace bnn {

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Replaces g by x e^{-iy} in the pushforward checks; they must then fail.
  bool inject_fault = false;
};

namespace detail {

inline Check relatedness_check(std::string id, std::string where, const CoordMap& theta, const VectorField& v,
                               const VectorField& w, std::span<const Point> samples, double tol) {
  const auto tests = polynomial_tests();
  return Check::make(std::move(id), std::move(where), relatedness_residual(theta, v, w, tests, samples).max_abs, tol);
}

/// Tangent-frame example: L = (x d_x + i(-x y d_x + (1 + y^2) d_y)) / 2.
inline VectorField tanex_frame() {
  const ScalarField x = ScalarField::coord_x(), y = ScalarField::coord_y();
  return {0.5 * (x - I * x * y), 0.5 * I * (ScalarField::constant(1.0) + y * y)};
}

inline std::vector<std::function<Check()>> verify_jobs(const VerifyOptions& o) {
  using namespace frames;
  const std::uint64_t seed = o.seed;
  const int orientation = o.inject_fault ? -1 : 1;
  std::vector<std::function<Check()>> jobs;

  // Pushforwards through g.
  auto push = [=](std::string id, std::string where, VectorField v, VectorField w) {
    return [=] {
      const auto samples = random_points_off_axis(0.1, 2.0, 1.3, 200, seed);
      return relatedness_check(id, where, polar_map(orientation), v, w, samples, 1e-9);
    };
  };
  const ScalarField X = ScalarField::coord_x(), Y = ScalarField::coord_y();
  jobs.push_back(push("pushforward.x_dx", "pushforward of x d_x under g is x d_x + y d_y", x_d_x(), {X, Y}));
  jobs.push_back(push("pushforward.dy", "pushforward of d_y under g is -y d_x + x d_y", d_y(), {-Y, X}));
  jobs.push_back(
      push("pushforward.b_dzbar", "pushforward of b-d_zbar under g is zbar d_zbar", b_d_zbar(), zbar() * d_zbar()));
  jobs.push_back(push("pushforward.b_dz", "pushforward of b-d_z under g is z d_z", b_d_z(), z() * d_z()));

  // b-holomorphic examples.
  jobs.push_back([=] {
    const auto samples = random_points(Rectangle(-2.0, 2.0, -4.0, 4.0), 200, seed + 1);
    return Check::make("bholo.polar", "b-d_zbar annihilates x e^{iy}",
                       bholo_residual(BFrame::standard(), polar_function(), samples).max_abs, 1e-12);
  });
  jobs.push_back([=] {
    const ScalarField g = polar_function();
    const ScalarField f = g.map([](const Jet& u) { return exp(-1.0 * reciprocal(u)); });
    const auto samples = random_points(Rectangle(0.1, 2.0, -3.0, 3.0), 200, seed + 2);
    return Check::make("bholo.exp_inverse_polar", "exp(-1/(x e^{iy})) is b-holomorphic on x > 0",
                       bholo_residual(BFrame::standard(), f, samples).max_abs, 1e-10);
  });
  jobs.push_back([=] {
    const auto samples = random_points(Rectangle(-2.0, 2.0, -2.0, 2.0), 200, seed + 3);
    const ScalarField p = X + I * X * Y;
    return Check::make("tanex.bholo", "x + i x y is annihilated by the tangent-frame structure",
                       bholo_residual(tanex_frame(), p, samples).max_abs, 1e-12);
  });
  jobs.push_back([=] {
    const auto samples = random_points_off_axis(0.1, 2.0, 1.3, 200, seed + 4);
    return relatedness_check("tanex.relatedness", "G pushes b-d_zbar to the tangent-frame structure", model_G(),
                             b_d_zbar(), tanex_frame(), samples, 1e-9);
  });

  // F built from f = x e^{iy} is G, with Jacobian [[1, 0], [0, 1]] at 0.
  auto model_F = [] {
    BuildFOptions b;
    b.start = Rectangle::square(1.0);
    return build_F(polar_function(), b);
  };
  jobs.push_back([=] {
    const Matrix2 j = model_F().F.jacobian({0.0, 0.0});
    const double d = std::max({std::abs(j[0][0] - 1.0), std::abs(j[0][1]), std::abs(j[1][0]), std::abs(j[1][1] - 1.0)});
    return Check::make("diffeo.jacobian_origin", "J_F(0) = [[1, 0], [*, 1]] for f = x e^{iy}", d, 1e-10);
  });
  jobs.push_back([=] {
    const BuiltF b = model_F();
    const CoordMap G = model_G();
    double worst = 0.0;
    for (const auto& p : random_points(b.domain, 100, seed + 5)) {
      const Point u = b.F(p), v = G(p);
      worst = std::max(worst, std::hypot(u.x - v.x, u.y - v.y));
    }
    return Check::make("diffeo.model_F", "F built from x e^{iy} equals G = (x cos y, tan y)", worst, 1e-10);
  });
  jobs.push_back([=] {
    const CoordMap G = model_G();
    double worst = 0.0;
    for (const auto& p : random_points(Rectangle(-2.0, 2.0, -1.3, 1.3), 200, seed + 6)) {
      const Point k = kappa(G(p));
      worst = std::max(worst, std::hypot(k.x - p.x * std::cos(p.y), k.y - p.x * std::sin(p.y)));
    }
    return Check::make("kappa.factorization", "g = kappa o G", worst, 1e-10);
  });

  // sigma-periodization and descent through g.
  auto flat = [] { return make_flat_field(1.0, FlatProfile::gauss_flat, Rectangle::square(2.0)); };
  jobs.push_back([=] {
    const ScalarField gamma(Rectangle::plane(), [](const Jet& x, const Jet&) { return flat_exp(x); });
    return Check::make("sigma.periodize", "periodized fields are sigma-invariant",
                       sigma_defect(periodize(gamma, 0.25).field(), seed + 7), 1e-10);
  });
  jobs.push_back([=] {
    const SigmaInvariantField s = periodize(flat(), 0.25);
    const ScalarField pushed = pushforward_flat_function(s);
    const CoordMap g = polar_map();
    double worst = 0.0;
    for (const auto& p : random_points_off_axis(0.05, 2.0, 4.0, 200, seed + 8)) {
      worst = std::max(worst, std::abs(pushed(g(p)) - s.field()(p)));
    }
    return Check::make("sigma.descent", "g_*(gamma) o g = gamma for sigma-invariant flat gamma", worst, 1e-10);
  });
  jobs.push_back([=] {
    const SigmaInvariantField s = periodize(0.1 * flat(), 0.25);
    const auto samples = random_points_off_axis(0.1, 1.5, 1.3, 100, seed + 9);
    return relatedness_check("pushforward.frame", "g pushes b-d_zbar + gamma b-d_z to zbar d_zbar + g_*(gamma) z d_z",
                             polar_map(), BFrame(s.field()).realize(), pushforward_b_frame(s), samples, 1e-9);
  });

  // Flows.
  for (int k = 1; k <= 4; ++k) {
    jobs.push_back([k] {
      const cplx z0 = k == 1 ? 1.0 : 0.5;
      const double r = std::max(flow_ode_residual(k, 0.0, 0.1, z0).max_abs,
                                flow_ode_residual(k, 0.0, cplx(0.1, 0.1), z0).max_abs);
      return Check::make("flows.ode.k" + std::to_string(k), "closed-form flow of z^k d_z solves the flow equation",
                         r, 1e-8);
    });
  }
  jobs.push_back([=] {
    std::mt19937_64 rng(seed + 10);
    std::uniform_real_distribution<double> u(-0.2, 0.2), zr(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
      for (int i = 0; i < 100; ++i) {
        const cplx w(u(rng), u(rng)), w2(u(rng), u(rng)), z(zr(rng), zr(rng));
        if (const auto d = semigroup_defect(k, w, w2, z)) worst = std::max(worst, *d);
      }
    return Check::make("flows.semigroup", "phi_w o phi_w' = phi_{w + w'}", worst, 1e-9);
  });
  jobs.push_back([=] {
    std::mt19937_64 rng(seed + 11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
      for (int i = 0; i < 100; ++i) {
        const double t = u(rng), x = u(rng);
        const FlowResult a = flow_1d(k, t, x), b = flow_complex(k, t, x);
        if (a.valid != b.valid) worst = std::numeric_limits<double>::infinity();
        if (a.valid && b.valid) worst = std::max(worst, std::abs(a.endpoint - b.endpoint) / (1.0 + std::abs(a.endpoint)));
      }
    return Check::make("flows.real_restriction", "complex-time flow restricted to real data is the real flow", worst,
                       1e-14);
  });
  jobs.push_back([=] {
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k)
      for (double y : {-3.0, -1.0, 0.5, 2.0}) worst = std::max(worst, std::abs(g_k(k, 0.0, y).endpoint));
    return Check::make("flows.gk_collapse", "g_k collapses x = 0 to the origin", worst, 0.0);
  });
  jobs.push_back([=] {
    double worst = 0.0;
    const auto samples = random_points(Rectangle::square(1.0), 50, seed + 12);
    for (int k = 1; k <= 4; ++k) {
      const HoloField h = HoloField::monomial(k);
      const VectorField b = lie_bracket(h.X, h.JX);
      for (const auto& p : samples) {
        const auto v = b(p);
        worst = std::max({worst, std::abs(v[0]), std::abs(v[1])});
      }
    }
    return Check::make("flows.commute", "X and JX commute for z^k d_z, k = 1..4", worst, 1e-9);
  });
  for (int k = 1; k <= 4; ++k) {
    jobs.push_back([=] {
      const auto samples = random_points(Rectangle::square(1.0), 100, seed + 13);
      const SignDetermination d = determine_gk_sign(k, samples);
      const std::string sign = d.passing_sign > 0 ? "plus" : d.passing_sign < 0 ? "minus" : "none";
      Check c = Check::make("gk.relatedness.k" + std::to_string(k) + ".sign_" + sign,
                            "(x^k d_x + s i d_y) / 2 is g_k-related to z^k d_z for exactly one sign s",
                            std::min(d.residual_plus, d.residual_minus), 1e-8);
      c.pass = c.pass && d.passing_sign != 0;
      return c;
    });
  }
  for (int k = 2; k <= 4; ++k) {
    jobs.push_back([k] {
      const std::vector<double> starts{-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0};
      const CompletenessResult r = jx_completeness(k, starts, 10.0);
      Check c = Check::make("flows.completeness.k" + std::to_string(k),
                            "integral curves of JX through the x-axis are complete (RK4 to T = 10 against g_k)",
                            r.endpoint_error, 1e-6);
      c.pass = c.pass && r.complete;
      return c;
    });
  }
  return jobs;
}

/// Runs jobs concurrently; output keeps the job order.
inline std::vector<Check> run_jobs(const std::vector<std::function<Check()>>& jobs) {
  std::vector<std::future<Check>> futures;
  futures.reserve(jobs.size());
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async, [job]() {
      try {
        return job();
      } catch (const std::exception& e) {
        return Check{"error", e.what(), std::numeric_limits<double>::quiet_NaN(), 0.0, false};
      }
    }));
  }
  std::vector<Check> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace detail

inline Report run_verify(const VerifyOptions& o = {}) {
  Report r;
  r.suite = "verify";
  r.seed = o.seed;
  r.checks = detail::run_jobs(detail::verify_jobs(o));
  if (o.inject_fault) r.details["inject_fault"] = true;
  return r;
}

// ---------------------------------------------------------------------------
// normalize

struct NormalizeOutcome {
  Report report;
  std::optional<NormalForm> result;
  /// Stage name when the pipeline failed.
  std::string failed_stage;
};

inline NormalizeOutcome run_normalize(const NormalizeRun& run) {
  NormalizeOutcome out;
  Report& r = out.report;
  const NormalizeConfig& c = run.pipeline;
  r.suite = "normalize";
  r.grid = c.grid;
  r.seed = c.seed;
  r.details["gamma"] = {{"profile", run.gamma.profile == FlatProfile::gauss_flat ? "gauss_flat" : "bump_flat"},
                        {"amplitude", run.gamma.amplitude},
                        {"support", run.gamma.support}};
  try {
    out.result = normalize_bstructure(BFrame(run.gamma.field()), c);
  } catch (const PipelineError& e) {
    out.failed_stage = e.stage();
    r.details["failed_stage"] = e.stage();
    r.details["error"] = e.what();
    r.add({"normalize.pipeline", "the normalization pipeline completes", std::numeric_limits<double>::quiet_NaN(),
           0.0, false});
    return out;
  }
  const NormalFormReport& n = out.result->report;
  r.add(Check::make("normalize.colinearity", "Phi_*(L) spans the same line as b-d_zbar off the strip",
                    n.colinearity.max_abs, c.tol_accept));
  r.add(Check::make("normalize.bholo", "f = h o g is annihilated by L", n.bholo.max_abs, c.bholo_accept));
  r.add(Check::make("normalize.jacobian_origin", "J_F(0) = [[1, 0], [*, 1]]", n.jacobian_defect(), 1e-6));
  r.add(Check::make("normalize.z_preserved", "Phi maps x = 0 into x = 0", n.z_defect, 1e-8));
  r.add(Check::make("normalize.frame_relatedness", "g pushes the periodized frame to its planar form",
                    n.frame_relatedness.max_abs, 1e-9));
  r.add(Check::make("normalize.beltrami_residual", "spectral residual of the Beltrami solve", n.beltrami_residual,
                    c.tol));
  if (run.gamma.amplitude == 0.0) {
    double worst = 0.0;
    for (const auto& p : random_points(n.domain_used, 100, c.seed + 1)) {
      const Point q = out.result->phi(p);
      worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
    }
    r.add(Check::make("normalize.identity", "Phi is the identity for the undeformed structure", worst, 1e-8));
  }
  const auto& j = n.jacobian_at_origin;
  r.details["iterations"] = n.iterations;
  r.details["sup_nu"] = n.sup_nu;
  r.details["halvings"] = n.halvings;
  r.details["domain"] = {n.domain_used.x_min(), n.domain_used.x_max(), n.domain_used.y_min(), n.domain_used.y_max()};
  r.details["jacobian_F_origin"] = {{j[0][0], j[0][1]}, {j[1][0], j[1][1]}};
  r.details["colinearity_argmax"] = {n.colinearity.argmax_point.x, n.colinearity.argmax_point.y};
  return out;
}

/// CSV `x,y,value_re,value_im` of Phi = (u, w) as u + i w on an n x n grid over `rect`.
inline void write_phi_csv(std::ostream& os, const CoordMap& phi, const Rectangle& rect, int n = 41) {
  os << "x,y,value_re,value_im\n" << std::setprecision(17);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Point p{rect.x_min() + rect.width() * i / (n - 1), rect.y_min() + rect.height() * k / (n - 1)};
      const Point q = phi(p);
      os << p.x << ',' << p.y << ',' << q.x << ',' << q.y << '\n';
    }
}

// ---------------------------------------------------------------------------
// beltrami

inline Report run_beltrami(const BeltramiRun& run) {
  Report r;
  r.suite = "beltrami";
  r.grid = run.grid;
  const BeltramiProblem problem = run.problem();
  const BeltramiSolution s = beurling_iterate(problem, run.options());
  r.add(Check::make("beltrami.residual", "|d_zbar h - nu d_z h| on the inner half of the grid", s.residual.max_abs,
                    run.kind == NuKind::bump ? run.tol_accept : run.tol));

  const Rectangle inner = problem.rect().scaled(0.5);
  auto closed_form_error = [&](const std::function<cplx(cplx)>& exact) {
    double worst = 0.0;
    for (int i = 0; i < s.h.nx(); ++i)
      for (int j = 0; j < s.h.ny(); ++j) {
        const Point p = s.h.node(i, j);
        if (inner.contains(p)) worst = std::max(worst, std::abs(s.h(i, j) - exact({p.x, p.y})));
      }
    return worst;
  };
  if (run.kind == NuKind::zero) {
    r.add(Check::make("beltrami.closed_form", "nu = 0 gives h = z", closed_form_error([](cplx z) { return z; }),
                      1e-12));
  } else if (run.kind == NuKind::constant) {
    const double c = run.value;
    r.add(Check::make("beltrami.closed_form", "constant nu = c gives h = (z + c zbar) / (1 + c)",
                      closed_form_error([c](cplx z) { return (z + c * std::conj(z)) / (1.0 + c); }),
                      run.tol_accept));
  }
  const auto ratios = contraction_ratios(s);
  const double worst_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  r.add(Check::make("beltrami.contraction", "successive increments contract by at most sup|nu| + 0.1", worst_ratio,
                    problem.sup_nu + 0.1));
  const Jet h0 = s.field().jet_at({0.0, 0.0}, 1);
  r.add(Check::make("beltrami.normalization", "h(0) = 0 and d_x h(0) = 1",
                    std::abs(h0.value()) + std::abs(h0(1, 0) - 1.0), 1e-10));
  r.details["iterations"] = s.iterations;
  r.details["converged"] = s.converged;
  r.details["sup_nu"] = problem.sup_nu;
  return r;
}

// ---------------------------------------------------------------------------
// flows

struct FlowCurve {
  double x0;
  std::vector<CurveSample> samples;
};

/// Integral curves of JX for z^k d_z from points on the x-axis.
inline std::vector<FlowCurve> figure_curves(int k, double T = 2.0 * std::numbers::pi, int record_every = 10) {
  std::vector<FlowCurve> out;
  for (double x0 : {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0}) {
    out.push_back({x0, integrate_rk4(jx_function(k), {x0, 0.0}, T, 1e-3, record_every)});
  }
  return out;
}

inline void write_curves_csv(std::ostream& os, const std::vector<FlowCurve>& curves) {
  os << "t,x,y\n" << std::setprecision(17);
  for (const auto& c : curves)
    for (const auto& s : c.samples) os << s.t << ',' << s.p.x << ',' << s.p.y << '\n';
}

/// Quiver plot of JX on [-1, 1]^2 with the integral curves, as plain SVG.
inline void write_flow_svg(std::ostream& os, int k, const std::vector<FlowCurve>& curves) {
  constexpr int size = 600;
  constexpr double margin = 30.0;
  const double scale = (size - 2 * margin) / 2.0;
  auto sx = [&](double x) { return margin + (x + 1.0) * scale; };
  auto sy = [&](double y) { return margin + (1.0 - y) * scale; };
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">JX for z^" << k
     << " d/dz</text>\n";
  os << "<line x1=\"" << sx(-1) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\"" << sy(0)
     << "\" stroke=\"#bbb\"/>\n";
  os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(-1) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(1)
     << "\" stroke=\"#bbb\"/>\n";
  const auto field = jx_function(k);
  constexpr int n = 21;
  const double arrow = 0.8 * 2.0 / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point p{-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1)};
      const Point v = field(p);
      const double m = norm(v);
      if (m < 1e-12) continue;
      const Point e{p.x + arrow * v.x / m, p.y + arrow * v.y / m};
      const double hx = -(e.x - p.x) * 0.3, hy = -(e.y - p.y) * 0.3;
      os << "<path d=\"M" << sx(p.x) << ',' << sy(p.y) << " L" << sx(e.x) << ',' << sy(e.y) << " M" << sx(e.x)
         << ',' << sy(e.y) << " L" << sx(e.x + hx - 0.5 * hy) << ',' << sy(e.y + hy + 0.5 * hx) << " M" << sx(e.x)
         << ',' << sy(e.y) << " L" << sx(e.x + hx + 0.5 * hy) << ',' << sy(e.y + hy - 0.5 * hx)
         << "\" stroke=\"#555\" fill=\"none\" stroke-width=\"1\"/>\n";
    }
  for (const auto& c : curves) {
    os << "<polyline fill=\"none\" stroke=\"#c03\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : c.samples) {
      if (std::abs(s.p.x) > 1.05 || std::abs(s.p.y) > 1.05) continue;
      os << sx(s.p.x) << ',' << sy(s.p.y) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace bnn

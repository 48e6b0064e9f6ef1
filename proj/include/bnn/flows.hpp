#pragma once

/**
 * @file flows.hpp
 * @brief Flows of x^k d/dx and z^k d/dz, the maps g_k and their relatedness.
 *
 * For V = f(z) d/dz write V = (X - i JX) / 2 with
 * X = Re f d/dx + Im f d/dy and JX = -Im f d/dx + Re f d/dy. X and JX
 * commute, so phi_{t + is} = phi^X_t o phi^{JX}_s, which is the closed form
 * phi_w(z) = z / (1 - (k - 1) w z^{k-1})^{1/(k-1)} (e^w z for k = 1).
 * g_k(x, y) = phi_{iy}(x).
 */

#include <numbers>

#include "bnn/polar.hpp"

namespace bnn {

struct FlowResult {
  cplx endpoint{};
  bool valid = false;
};

inline constexpr double kFlowDenominatorFloor = 1e-9;

namespace detail {
inline void require_k(int k) {
  if (k < 1) throw std::invalid_argument("flow exponent k must be >= 1");
}
}  // namespace detail

/// Complex-time flow of z^k d/dz, principal branch of the (k-1)-th root.
inline FlowResult flow_1d(int k, double t, double x);

inline FlowResult flow_complex(int k, cplx w, cplx z) {
  detail::require_k(k);
  if (w.imag() == 0.0 && z.imag() == 0.0) return flow_1d(k, w.real(), z.real());
  if (k == 1) return {std::exp(w) * z, true};
  if (z == 0.0) return {0.0, true};
  const double m = k - 1;
  const cplx radicand = 1.0 - m * w * std::pow(z, k - 1);
  if (std::abs(radicand) < kFlowDenominatorFloor) return {};
  if (radicand.imag() == 0.0 && radicand.real() <= 0.0) return {};
  return {z / std::pow(radicand, 1.0 / m), true};
}

/// Real-time flow of x^k d/dx.
inline FlowResult flow_1d(int k, double t, double x) {
  detail::require_k(k);
  if (k == 1) return {std::exp(t) * x, true};
  if (x == 0.0) return {0.0, true};
  const double m = k - 1;
  const double radicand = 1.0 - m * t * std::pow(x, k - 1);
  if (std::abs(radicand) < kFlowDenominatorFloor || radicand < 0.0) return {};
  return {x / std::pow(radicand, 1.0 / m), true};
}

/// g_k(x, y) = phi_{iy}(x); g_1 is the polar map x e^{iy}.
inline FlowResult g_k(int k, double x, double y) { return flow_complex(k, cplx(0.0, y), x); }

/// g_k as a map R^2 -> R^2 (real and imaginary parts).
inline CoordMap g_k_map(int k) {
  detail::require_k(k);
  if (k == 1) return polar_map();
  return {Rectangle::plane(), [k](const Jet& x, const Jet& y) {
            const double m = k - 1;
            const Jet g = x * pow(1.0 - I * m * pow(x, k - 1) * y, -1.0 / m);
            return CoordMap::JetPair{g.real(), g.imag()};
          }};
}

/// f(z) d/dz for an entire f real on the real axis, as the real pair X, JX.
struct HoloField {
  int k = 0;
  std::function<cplx(cplx)> f_eval;
  VectorField X;
  VectorField JX;

  static HoloField monomial(int k) {
    detail::require_k(k);
    const ScalarField zk = ScalarField(Rectangle::plane(), [k](const Jet& x, const Jet& y) {
      return pow(x + I * y, k);
    });
    const ScalarField re = zk.real(), im = zk.imag();
    return {k, [k](cplx z) { return std::pow(z, k); }, {re, im}, {-1.0 * im, re}};
  }
};

/// -Im(z^k) d/dx + Re(z^k) d/dy.
inline VectorField jx_field(int k) { return HoloField::monomial(k).JX; }

/// (x^k d/dx + sign i d/dy) / 2 on the source of g_k.
inline VectorField gk_source_field(int k, int sign) {
  detail::require_k(k);
  const ScalarField xk(Rectangle::plane(), [k](const Jet& x, const Jet&) { return pow(x, k); });
  return {0.5 * xk, ScalarField::constant(0.5 * I * static_cast<double>(sign))};
}

/// z^k d/dz in coordinates.
inline VectorField zk_d_z(int k) {
  const ScalarField zk(Rectangle::plane(), [k](const Jet& x, const Jet& y) { return pow(x + I * y, k); });
  return zk * frames::d_z();
}

/// Relatedness of (x^k d/dx + sign i d/dy) / 2 to z^k d/dz through g_k.
inline Residual relatedness_gk(int k, int sign, std::span<const Point> samples) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("relatedness_gk: sign must be +1 or -1");
  std::vector<Point> valid;
  for (const auto& p : samples)
    if (g_k(k, p.x, p.y).valid) valid.push_back(p);
  if (valid.empty()) throw std::invalid_argument("relatedness_gk: no sample in the domain of g_k");
  const auto tests = polynomial_tests();
  return relatedness_residual(g_k_map(k), gk_source_field(k, sign), zk_d_z(k), tests, valid);
}

struct SignDetermination {
  int k = 0;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  /// +1 or -1 when exactly one sign passes, else 0.
  int passing_sign = 0;
};

inline SignDetermination determine_gk_sign(int k, std::span<const Point> samples, double tol = 1e-8) {
  SignDetermination d{k, relatedness_gk(k, 1, samples).max_abs, relatedness_gk(k, -1, samples).max_abs, 0};
  const bool plus = d.residual_plus <= tol, minus = d.residual_minus <= tol;
  if (plus != minus) d.passing_sign = plus ? 1 : -1;
  return d;
}

/**
 * Along w_k = w0 + (w1 - w0) k / (n - 1), the larger of
 * |d/dt phi_{w+t}(z0) - f(phi)| and |d/ds phi_{w+is}(z0) - i f(phi)|,
 * derivatives by fourth-order central differences.
 */
inline Residual flow_ode_residual(int k, cplx w0, cplx w1, cplx z0, int n = 21, double h = 1e-3) {
  detail::require_k(k);
  if (n < 2) throw std::invalid_argument("flow_ode_residual: need at least two path points");
  auto at = [&](cplx w) {
    const FlowResult r = flow_complex(k, w, z0);
    if (!r.valid) throw DomainError("flow_ode_residual: path leaves the domain of the flow");
    return r.endpoint;
  };
  auto fd = [&](cplx w, cplx dir) {
    return (at(w - 2.0 * h * dir) - 8.0 * at(w - h * dir) + 8.0 * at(w + h * dir) - at(w + 2.0 * h * dir)) /
           (12.0 * h);
  };
  Residual r;
  for (int j = 0; j < n; ++j) {
    const cplx w = w0 + (w1 - w0) * (static_cast<double>(j) / (n - 1));
    const cplx phi = at(w);
    const cplx f = std::pow(phi, k);
    const double e = std::max(std::abs(fd(w, 1.0) - f), std::abs(fd(w, I) - I * f));
    r.record(e, {w.real(), w.imag()});
  }
  return r;
}

namespace detail {
/// Closed triangle (a, b, c) in the plane, degenerate triangles included.
inline bool in_triangle(cplx p, cplx a, cplx b, cplx c) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(b - a, p - a), d2 = cross(c - b, p - b), d3 = cross(a - c, p - c);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}
}  // namespace detail

/**
 * |phi_w(phi_w'(z)) - phi_{w+w'}(z)|, or nullopt when a flow is undefined.
 * Also undefined when the time triangle (0, w', w + w') encloses the blow-up
 * time 1 / ((k - 1) z^{k-1}): the two time paths are then not homotopic.
 */
inline std::optional<double> semigroup_defect(int k, cplx w, cplx w2, cplx z) {
  if (k >= 2 && z != 0.0) {
    const cplx blowup = 1.0 / (static_cast<double>(k - 1) * std::pow(z, k - 1));
    if (detail::in_triangle(blowup, 0.0, w2, w + w2)) return std::nullopt;
  }
  const FlowResult inner = flow_complex(k, w2, z);
  if (!inner.valid) return std::nullopt;
  const FlowResult lhs = flow_complex(k, w, inner.endpoint);
  const FlowResult rhs = flow_complex(k, w + w2, z);
  if (!lhs.valid || !rhs.valid) return std::nullopt;
  return std::abs(lhs.endpoint - rhs.endpoint);
}

struct CurveSample {
  double t;
  Point p;
};

/// Classic RK4 with fixed step for a real planar field.
inline std::vector<CurveSample> integrate_rk4(const std::function<Point(const Point&)>& field, Point start, double T,
                                             double step = 1e-3, int record_every = 1) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate_rk4: step must be positive");
  const int steps = static_cast<int>(std::llround(std::abs(T) / step));
  const double h = (T >= 0 ? 1.0 : -1.0) * std::abs(T) / std::max(steps, 1);
  std::vector<CurveSample> out{{0.0, start}};
  Point p = start;
  auto add = [](Point a, Point b, double s) { return Point{a.x + s * b.x, a.y + s * b.y}; };
  for (int i = 1; i <= steps; ++i) {
    const Point k1 = field(p);
    const Point k2 = field(add(p, k1, h / 2));
    const Point k3 = field(add(p, k2, h / 2));
    const Point k4 = field(add(p, k3, h));
    p = {p.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), p.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      out.push_back({i * h, p});
      return out;
    }
    if (i % record_every == 0 || i == steps) out.push_back({i * h, p});
  }
  return out;
}

/// The real field JX of z^k d/dz as a plain function.
inline std::function<Point(const Point&)> jx_function(int k) {
  detail::require_k(k);
  return [k](const Point& p) {
    const cplx v = std::pow(cplx(p.x, p.y), k);
    return Point{-v.imag(), v.real()};
  };
}

struct CompletenessResult {
  bool complete = true;
  double max_modulus = 0.0;
  /// max |RK4 endpoint - g_k(x, T)|.
  double endpoint_error = 0.0;
};

/// Integrates JX from real starting points to time T and compares with g_k.
inline CompletenessResult jx_completeness(int k, std::span<const double> starts, double T = 10.0,
                                          double bound = 1e6) {
  CompletenessResult res;
  const auto field = jx_function(k);
  for (double x : starts) {
    const auto curve = integrate_rk4(field, {x, 0.0}, T, 1e-3, 100);
    for (const auto& s : curve) {
      const double m = norm(s.p);
      if (!std::isfinite(m) || m > bound) res.complete = false;
      res.max_modulus = std::max(res.max_modulus, m);
    }
    const FlowResult exact = g_k(k, x, T);
    if (!exact.valid) {
      res.complete = false;
      continue;
    }
    const Point e = curve.back().p;
    res.endpoint_error = std::max(res.endpoint_error, std::abs(cplx(e.x, e.y) - exact.endpoint));
  }
  return res;
}

}  // namespace bnn

#pragma once

/**
 * @file bgeom.hpp
 * @brief Vector fields, b-frames, brackets and the residual functionals.
 *
 * All vector fields are stored by their coefficients in the coordinate
 * frame (alpha d/dx + beta d/dy), so a b-vector field such as
 * bd_zbar = (x d/dx + i d/dy) / 2 is just the pair (x/2, i/2).
 */

#include <span>
#include <vector>

#include "bnn/coord_map.hpp"

namespace bnn {

struct VectorField {
  ScalarField alpha;
  ScalarField beta;

  std::array<cplx, 2> operator()(const Point& p) const { return {alpha(p), beta(p)}; }
  Rectangle domain() const { return alpha.domain().intersect(beta.domain()); }
};

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.alpha + b.alpha, a.beta + b.beta};
}
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.alpha - b.alpha, a.beta - b.beta};
}
inline VectorField operator*(const ScalarField& f, const VectorField& v) {
  return {f * v.alpha, f * v.beta};
}
inline VectorField operator*(cplx s, const VectorField& v) { return {s * v.alpha, s * v.beta}; }

/// Coefficient-wise complex conjugate.
inline VectorField conj(const VectorField& v) { return {v.alpha.conj(), v.beta.conj()}; }

/// Standard frames of the plane, in coordinates.
namespace frames {
inline VectorField d_x() { return {ScalarField::constant(1.0), ScalarField::zero()}; }
inline VectorField d_y() { return {ScalarField::zero(), ScalarField::constant(1.0)}; }
inline VectorField x_d_x() { return {ScalarField::coord_x(), ScalarField::zero()}; }
/// (d/dx + i d/dy) / 2
inline VectorField d_zbar() { return {ScalarField::constant(0.5), ScalarField::constant(0.5 * I)}; }
/// (d/dx - i d/dy) / 2
inline VectorField d_z() { return {ScalarField::constant(0.5), ScalarField::constant(-0.5 * I)}; }
/// (x d/dx + i d/dy) / 2
inline VectorField b_d_zbar() { return {0.5 * ScalarField::coord_x(), ScalarField::constant(0.5 * I)}; }
/// (x d/dx - i d/dy) / 2
inline VectorField b_d_z() { return {0.5 * ScalarField::coord_x(), ScalarField::constant(-0.5 * I)}; }
/// z as a complex function x + i y.
inline ScalarField z() { return ScalarField::coord_x() + I * ScalarField::coord_y(); }
inline ScalarField zbar() { return ScalarField::coord_x() - I * ScalarField::coord_y(); }
}  // namespace frames

/**
 * The single generator L = bd_zbar + gamma * bd_z of a two-dimensional
 * complex b-structure with singular locus {x = 0}. gamma must vanish on
 * the locus.
 */
class BFrame {
 public:
  explicit BFrame(ScalarField gamma) : gamma_(std::move(gamma)) {
    if (!vanishes_on_axis(gamma_)) {
      throw PreconditionError("BFrame: deformation does not vanish on x = 0");
    }
  }
  static BFrame standard() { return BFrame(ScalarField::zero()); }

  const ScalarField& gamma() const { return gamma_; }

  /// alpha = x (1 + gamma) / 2, beta = i (1 - gamma) / 2.
  VectorField realize() const {
    const ScalarField x = ScalarField::coord_x();
    return {0.5 * (x + x * gamma_), 0.5 * I * (ScalarField::constant(1.0) - gamma_)};
  }

 private:
  ScalarField gamma_;
};

struct Residual {
  double max_abs = 0.0;
  Point argmax_point{};
  std::size_t n_samples = 0;

  void record(double value, const Point& p) {
    ++n_samples;
    if (!(value <= max_abs)) {  // NaN propagates as a failure
      max_abs = value;
      argmax_point = p;
    }
  }
  /// Pointwise maximum with another residual over disjoint samples.
  void merge(const Residual& o) {
    if (!(o.max_abs <= max_abs)) {
      max_abs = o.max_abs;
      argmax_point = o.argmax_point;
    }
    n_samples += o.n_samples;
  }
};

/// V f at p = alpha(p) f_x(p) + beta(p) f_y(p).
inline cplx apply(const VectorField& v, const ScalarField& f, const Point& p) {
  const Jet j = f.jet_at(p, 1);
  return v.alpha(p) * j(1, 0) + v.beta(p) * j(0, 1);
}

/// V f as a field.
inline ScalarField apply(const VectorField& v, const ScalarField& f) {
  return v.alpha * f.derivative_x() + v.beta * f.derivative_y();
}

/// [V, W] = V(W) - W(V), coefficient-wise.
inline VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  return {apply(v, w.alpha) - apply(w, v.alpha), apply(v, w.beta) - apply(w, v.beta)};
}

namespace detail {
inline void require_samples(std::span<const Point> samples) {
  if (samples.empty()) throw std::invalid_argument("residual: empty sample set");
}
}  // namespace detail

/// max |L f| / (1 + |grad f|) over samples.
inline Residual bholo_residual(const VectorField& l, const ScalarField& f, std::span<const Point> samples) {
  detail::require_samples(samples);
  Residual r;
  for (const auto& p : samples) {
    const Jet j = f.jet_at(p, 1);
    const cplx lf = l.alpha(p) * j(1, 0) + l.beta(p) * j(0, 1);
    const double grad = std::sqrt(std::norm(j(1, 0)) + std::norm(j(0, 1)));
    r.record(std::abs(lf) / (1.0 + grad), p);
  }
  return r;
}

inline Residual bholo_residual(const BFrame& l, const ScalarField& f, std::span<const Point> samples) {
  return bholo_residual(l.realize(), f, samples);
}

/**
 * Checks that V on the source is theta-related to W on the target:
 * max over samples p and test functions psi of
 * |W(psi)(theta(p)) - V(psi o theta)(p)| / (1 + |grad(psi o theta)(p)|).
 */
inline Residual relatedness_residual(const CoordMap& theta, const VectorField& v, const VectorField& w,
                                     std::span<const ScalarField> test_functions,
                                     std::span<const Point> samples) {
  detail::require_samples(samples);
  if (test_functions.empty()) throw std::invalid_argument("relatedness_residual: no test functions");
  Residual r;
  for (const auto& p : samples) {
    const Point q = theta(p);
    double worst = 0.0;
    for (const auto& psi : test_functions) {
      const ScalarField pulled = pullback(psi, theta);
      const Jet jp = pulled.jet_at(p, 1);
      const cplx lhs = apply(w, psi, q);
      const cplx rhs = v.alpha(p) * jp(1, 0) + v.beta(p) * jp(0, 1);
      const double grad = std::sqrt(std::norm(jp(1, 0)) + std::norm(jp(0, 1)));
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + grad));
    }
    r.record(worst, p);
  }
  return r;
}

/// Polynomial test functions in z and zbar used for relatedness checks.
inline std::vector<ScalarField> polynomial_tests() {
  const ScalarField z = frames::z(), zb = frames::zbar();
  return {z, zb, z * z, z * zb, zb * zb * z};
}

/**
 * Least-squares remainder of [V, W](p) against span{V(p), W(p)} in C^2,
 * relative to (1 + |[V, W](p)|).
 */
inline Residual involutivity_residual(const VectorField& v, const VectorField& w, std::span<const Point> samples) {
  detail::require_samples(samples);
  const VectorField b = lie_bracket(v, w);
  Residual r;
  for (const auto& p : samples) {
    const auto a1 = v(p), a2 = w(p), c = b(p);
    auto dot = [](const std::array<cplx, 2>& u, const std::array<cplx, 2>& t) {
      return std::conj(u[0]) * t[0] + std::conj(u[1]) * t[1];
    };
    auto nrm = [&](const std::array<cplx, 2>& u) { return std::sqrt(std::abs(dot(u, u))); };
    const double n1 = nrm(a1), n2 = nrm(a2);
    const double wedge = std::abs(a1[0] * a2[1] - a1[1] * a2[0]);
    if (n1 == 0.0 || n2 == 0.0 || wedge <= 1e-10 * n1 * n2) {
      throw DegenerateError("involutivity_residual: V(p), W(p) do not span a plane");
    }
    // Gram-Schmidt basis of the span, then project.
    std::array<cplx, 2> e1{a1[0] / n1, a1[1] / n1};
    const cplx k = dot(e1, a2);
    std::array<cplx, 2> e2{a2[0] - k * e1[0], a2[1] - k * e1[1]};
    const double n2p = nrm(e2);
    e2 = {e2[0] / n2p, e2[1] / n2p};
    const cplx c1 = dot(e1, c), c2 = dot(e2, c);
    const std::array<cplx, 2> rem{c[0] - c1 * e1[0] - c2 * e2[0], c[1] - c1 * e1[1] - c2 * e2[1]};
    r.record(nrm(rem) / (1.0 + nrm(c)), p);
  }
  return r;
}

/// max |alpha_V beta_W - alpha_W beta_V| / (|V| |W|); zero where V vanishes.
inline Residual colinearity_residual(const VectorField& v, const VectorField& w, std::span<const Point> samples) {
  detail::require_samples(samples);
  Residual r;
  for (const auto& p : samples) {
    const auto a = v(p), b = w(p);
    const double nb = std::sqrt(std::norm(b[0]) + std::norm(b[1]));
    if (nb == 0.0) throw DegenerateError("colinearity_residual: W vanishes at a sample");
    const double na = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
    r.record(na == 0.0 ? 0.0 : std::abs(a[0] * b[1] - b[0] * a[1]) / (na * nb), p);
  }
  return r;
}

/// Colinearity of two vectors given directly.
inline double colinearity(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
  const double na = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
  const double nb = std::sqrt(std::norm(b[0]) + std::norm(b[1]));
  if (nb == 0.0) throw DegenerateError("colinearity: reference vector vanishes");
  return na == 0.0 ? 0.0 : std::abs(a[0] * b[1] - b[0] * a[1]) / (na * nb);
}

}  // namespace bnn

#pragma once

/**
 * @file fields.hpp
 * @brief Complex-valued fields on planar rectangles with exact derivatives.
 *
 * A ScalarField is a formula on jets: evaluating it on the seed jets of a
 * point gives its value and every partial derivative up to the jet order.
 * Fields compose (sums, products, derivatives, pullbacks by maps) without
 * losing derivative information. Grid-sampled data enters through the same
 * interface, see grid_field.hpp.
 */

#include <boost/math/quadrature/gauss.hpp>
#include <functional>
#include <memory>
#include <utility>

#include "bnn/geometry.hpp"
#include "bnn/jet.hpp"

namespace bnn {

enum class Backend { exact, grid };
enum class Direction { x, y, z, zbar };

/// Sum c(i,j) (X - X0)^i (Y - Y0)^j for a Taylor jet `t` expanded at (X0, Y0).
inline Jet compose_taylor(const Jet& t, const Jet& X, const Jet& Y) {
  const int n = std::min(X.order(), Y.order());
  Jet dx = X.truncated(n), dy = Y.truncated(n);
  dx.at(0) = 0.0;
  dy.at(0) = 0.0;
  Jet r(n, t.value());
  if (n == 0) return r;
  const int m = std::min(n, t.order());
  std::array<Jet, Jet::kMaxOrder + 1> px, py;
  px[0] = Jet(n, 1.0);
  py[0] = Jet(n, 1.0);
  for (int k = 1; k <= m; ++k) {
    px[k] = px[k - 1] * dx;
    py[k] = py[k - 1] * dy;
  }
  for (int d = 1; d <= m; ++d)
    for (int j = 0; j <= d; ++j) {
      const cplx c = t(d - j, j);
      if (c == 0.0) continue;
      r.add_scaled(px[d - j] * py[j], c);
    }
  return r;
}

namespace detail {
inline bool is_seed(const Jet& v, int which) {
  if (v.order() == 0) return true;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const cplx expect = (k == static_cast<std::size_t>(which == 0 ? 1 : 2)) ? 1.0 : 0.0;
    if (v.at(k) != expect) return false;
  }
  return true;
}
}  // namespace detail

class ScalarField {
 public:
  using JetFn = std::function<Jet(const Jet&, const Jet&)>;

  ScalarField(Rectangle domain, JetFn fn, Backend backend = Backend::exact)
      : domain_(domain), fn_(std::make_shared<const JetFn>(std::move(fn))), backend_(backend) {}

  static ScalarField constant(cplx c, Rectangle domain = Rectangle::plane()) {
    return {domain, [c](const Jet& x, const Jet& y) {
              return Jet(std::min(x.order(), y.order()), c);
            }};
  }
  static ScalarField zero(Rectangle domain = Rectangle::plane()) { return constant(0.0, domain); }
  static ScalarField coord_x(Rectangle domain = Rectangle::plane()) {
    return {domain, [](const Jet& x, const Jet&) { return x; }};
  }
  static ScalarField coord_y(Rectangle domain = Rectangle::plane()) {
    return {domain, [](const Jet&, const Jet& y) { return y; }};
  }

  const Rectangle& domain() const { return domain_; }
  Backend backend() const { return backend_; }

  /// Evaluate on arbitrary jets; the base point must lie in the domain.
  Jet jet(const Jet& x, const Jet& y) const {
    require_in(domain_, {x.value().real(), y.value().real()}, "ScalarField");
    return (*fn_)(x, y);
  }

  /// Taylor jet of the field at p.
  Jet jet_at(const Point& p, int order) const {
    return jet(Jet::variable(order, p.x, 0), Jet::variable(order, p.y, 1));
  }

  cplx operator()(const Point& p) const { return jet_at(p, 0).value(); }
  cplx operator()(double x, double y) const { return (*this)(Point{x, y}); }
  cplx dx(const Point& p) const { return jet_at(p, 1)(1, 0); }
  cplx dy(const Point& p) const { return jet_at(p, 1)(0, 1); }

  /// |grad f| = sqrt(|f_x|^2 + |f_y|^2).
  double gradient_norm(const Point& p) const {
    const Jet j = jet_at(p, 1);
    return std::sqrt(std::norm(j(1, 0)) + std::norm(j(0, 1)));
  }

  ScalarField derivative_x() const { return partial(0); }
  ScalarField derivative_y() const { return partial(1); }

  /// Apply a jet-level map pointwise: result(p) = op(this(p)).
  template <class Op>
  ScalarField map(Op op) const {
    auto self = *this;
    return {domain_, [self, op](const Jet& x, const Jet& y) { return op(self.jet(x, y)); },
            backend_};
  }

  ScalarField real() const { return map([](const Jet& v) { return v.real(); }); }
  ScalarField imag() const { return map([](const Jet& v) { return v.imag(); }); }
  ScalarField conj() const { return map([](const Jet& v) { return v.conj(); }); }

  friend ScalarField combine(const ScalarField& a, const ScalarField& b,
                             std::function<Jet(const Jet&, const Jet&)> op) {
    const Backend be = (a.backend_ == Backend::grid || b.backend_ == Backend::grid)
                           ? Backend::grid
                           : Backend::exact;
    return {a.domain_.intersect(b.domain_),
            [a, b, op](const Jet& x, const Jet& y) { return op(a.jet(x, y), b.jet(x, y)); }, be};
  }

 private:
  ScalarField partial(int which) const {
    auto self = *this;
    return {domain_,
            [self, which](const Jet& X, const Jet& Y) {
              const int n = std::min(X.order(), Y.order());
              if (n + 1 > Jet::kMaxOrder) throw std::out_of_range("derivative nesting exceeds jet order");
              const Point base{X.value().real(), Y.value().real()};
              const Jet t = self.jet_at(base, n + 1);
              const Jet d = which == 0 ? t.dx() : t.dy();
              if (detail::is_seed(X, 0) && detail::is_seed(Y, 1) && X.order() == Y.order()) return d;
              return compose_taylor(d, X, Y);
            },
            backend_};
  }

  Rectangle domain_;
  std::shared_ptr<const JetFn> fn_;
  Backend backend_;
};

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u + v; });
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u - v; });
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u * v; });
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u / v; });
}
inline ScalarField operator*(cplx s, const ScalarField& a) {
  return a.map([s](const Jet& v) { return v * s; });
}
inline ScalarField operator*(const ScalarField& a, cplx s) { return s * a; }
inline ScalarField operator+(const ScalarField& a, cplx s) {
  return a.map([s](const Jet& v) { return v + s; });
}
inline ScalarField operator+(cplx s, const ScalarField& a) { return a + s; }
inline ScalarField operator-(const ScalarField& a, cplx s) { return a + (-s); }
inline ScalarField operator-(cplx s, const ScalarField& a) {
  return a.map([s](const Jet& v) { return -v + s; });
}
inline ScalarField operator-(const ScalarField& a) {
  return a.map([](const Jet& v) { return -v; });
}

/// First derivative of f at p in the requested direction; d/dz = (d/dx - i d/dy)/2.
inline cplx derive(const ScalarField& f, Direction dir, const Point& p) {
  const Jet j = f.jet_at(p, 1);
  switch (dir) {
    case Direction::x: return j(1, 0);
    case Direction::y: return j(0, 1);
    case Direction::z: return 0.5 * (j(1, 0) - I * j(0, 1));
    case Direction::zbar: return 0.5 * (j(1, 0) + I * j(0, 1));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Flat functions and smooth cutoffs.

/// exp(-1/x^2), with every coefficient exactly zero for |x| < 1e-6.
inline Jet flat_exp(const Jet& x) {
  if (std::abs(x.value()) < 1e-6) return Jet(x.order(), 0.0);
  return exp(-1.0 / (x * x));
}

/// Smooth monotone step: 0 for t <= 0, 1 for t >= 1, flat at both ends.
inline Jet smooth_step(const Jet& t) {
  const double t0 = t.value().real();
  if (t0 <= 1e-6) return Jet(t.order(), 0.0);
  if (t0 >= 1.0 - 1e-6) return Jet(t.order(), 1.0);
  const Jet a = exp(-1.0 / t);
  const Jet b = exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// 1 on [lo + width, hi - width], 0 outside (lo, hi).
inline Jet plateau(const Jet& s, double lo, double hi, double width) {
  return smooth_step((s - lo) / width) * smooth_step((hi - s) / width);
}

enum class FlatProfile { gauss_flat, bump_flat };

/**
 * A smooth field vanishing to infinite order on {x = 0} and supported in
 * `support`.
 *
 * gauss_flat: amplitude * exp(-1/x^2) * chi(x, y), chi a plateau cutoff equal
 * to one except within a quarter half-width of the support edges.
 * bump_flat: amplitude * exp(-1/x^2) * b(x) * b(y), b the standard bump
 * exp(1 - 1/(1 - s^2)) in the support-normalized coordinate s.
 */
inline ScalarField make_flat_field(double amplitude, FlatProfile profile, const Rectangle& support) {
  if (amplitude < 0) throw std::invalid_argument("make_flat_field: amplitude must be >= 0");
  if (!support.is_finite()) throw std::invalid_argument("make_flat_field: support must be finite");
  if (amplitude == 0.0) return ScalarField::zero();
  const Rectangle s = support;
  if (profile == FlatProfile::gauss_flat) {
    const double wx = 0.25 * 0.5 * s.width(), wy = 0.25 * 0.5 * s.height();
    return {Rectangle::plane(), [=](const Jet& x, const Jet& y) {
              const Jet chi_x = plateau(x, s.x_min(), s.x_max(), wx);
              if (chi_x.is_zero()) return Jet(std::min(x.order(), y.order()), 0.0);
              const Jet chi_y = plateau(y, s.y_min(), s.y_max(), wy);
              if (chi_y.is_zero()) return Jet(std::min(x.order(), y.order()), 0.0);
              return amplitude * flat_exp(x) * chi_x * chi_y;
            }};
  }
  const double cx = 0.5 * (s.x_min() + s.x_max()), cy = 0.5 * (s.y_min() + s.y_max());
  const double hx = 0.5 * s.width(), hy = 0.5 * s.height();
  auto bump = [](const Jet& u) {
    const double u0 = u.value().real();
    if (std::abs(u0) >= 1.0 - 1e-6) return Jet(u.order(), 0.0);
    return exp(1.0 - 1.0 / (1.0 - u * u));
  };
  return {Rectangle::plane(), [=](const Jet& x, const Jet& y) {
            const Jet bx = bump((x - cx) / hx);
            const Jet by = bump((y - cy) / hy);
            if (bx.is_zero() || by.is_zero()) return Jet(std::min(x.order(), y.order()), 0.0);
            return amplitude * flat_exp(x) * bx * by;
          }};
}

// ---------------------------------------------------------------------------
// Division by x.

namespace detail {
/// Finite window of a possibly unbounded rectangle, used for sampling checks.
inline Rectangle sampling_window(const Rectangle& r, double clip = 2.0) {
  return r.intersect(Rectangle::square(clip));
}
}  // namespace detail

/// Largest |f(0, y)| relative to (1 + max |f|) over a fixed sample set.
inline double axis_defect(const ScalarField& f) {
  const Rectangle w = detail::sampling_window(f.domain());
  if (w.x_min() > 0.0 || w.x_max() < 0.0) {
    throw PreconditionError("field domain does not meet the line x = 0");
  }
  double on_axis = 0.0, overall = 0.0;
  constexpr int kAxis = 65, kGrid = 9;
  for (int k = 0; k < kAxis; ++k) {
    const double y = w.y_min() + w.height() * k / (kAxis - 1);
    on_axis = std::max(on_axis, std::abs(f(0.0, y)));
  }
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const Point p{w.x_min() + w.width() * i / (kGrid - 1), w.y_min() + w.height() * j / (kGrid - 1)};
      overall = std::max(overall, std::abs(f(p)));
    }
  overall = std::max(overall, on_axis);
  return on_axis / (1.0 + overall);
}

inline constexpr double kAxisTolerance = 1e-9;

inline bool vanishes_on_axis(const ScalarField& f) { return axis_defect(f) <= kAxisTolerance; }

/**
 * The smooth quotient f / x for f vanishing on {x = 0}:
 * a(x, y) = integral_0^1 (d_x f)(s x, y) ds, by 64-point Gauss-Legendre.
 */
inline ScalarField hadamard_quotient(const ScalarField& f) {
  if (!vanishes_on_axis(f)) {
    throw PreconditionError("hadamard_quotient: field does not vanish on x = 0");
  }
  using Gauss = boost::math::quadrature::gauss<double, 64>;
  const ScalarField fx = f.derivative_x();
  return {f.domain(),
          [fx](const Jet& X, const Jet& Y) {
            const auto& abscissa = Gauss::abscissa();
            const auto& weights = Gauss::weights();
            Jet acc(std::min(X.order(), Y.order()), 0.0);
            for (std::size_t k = 0; k < abscissa.size(); ++k) {
              for (double sign : {-1.0, 1.0}) {
                const double s = 0.5 * (1.0 + sign * abscissa[k]);
                acc.add_scaled(fx.jet(s * X, Y), 0.5 * weights[k]);
              }
            }
            return acc;
          },
          f.backend()};
}

}  // namespace bnn

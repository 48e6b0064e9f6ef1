#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "bnn/fields.hpp"

namespace bnn {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// A smooth map R^2 -> R^2 on a rectangle, evaluable on jets.
class CoordMap {
 public:
  using JetPair = std::array<Jet, 2>;
  using JetMap = std::function<JetPair(const Jet&, const Jet&)>;

  CoordMap(Rectangle domain, JetMap fn)
      : domain_(domain), fn_(std::make_shared<const JetMap>(std::move(fn))) {}

  static CoordMap identity(Rectangle domain = Rectangle::plane()) {
    CoordMap id(domain, [](const Jet& x, const Jet& y) { return JetPair{x, y}; });
    return id.with_inverse(CoordMap(domain, [](const Jet& x, const Jet& y) { return JetPair{x, y}; }));
  }

  /// Map given by two real scalar fields.
  static CoordMap from_components(const ScalarField& first, const ScalarField& second) {
    return {first.domain().intersect(second.domain()), [first, second](const Jet& x, const Jet& y) {
              return JetPair{first.jet(x, y).real(), second.jet(x, y).real()};
            }};
  }

  const Rectangle& domain() const { return domain_; }

  JetPair jet(const Jet& x, const Jet& y) const {
    require_in(domain_, {x.value().real(), y.value().real()}, "CoordMap");
    return (*fn_)(x, y);
  }

  Point operator()(const Point& p) const {
    const auto v = jet(Jet(0, p.x), Jet(0, p.y));
    return {v[0].value().real(), v[1].value().real()};
  }

  Matrix2 jacobian(const Point& p) const {
    const auto v = jet(Jet::variable(1, p.x, 0), Jet::variable(1, p.y, 1));
    return {{{v[0](1, 0).real(), v[0](0, 1).real()}, {v[1](1, 0).real(), v[1](0, 1).real()}}};
  }

  ScalarField component(int k) const {
    auto self = *this;
    return {domain_, [self, k](const Jet& x, const Jet& y) { return self.jet(x, y)[k]; }};
  }

  bool has_inverse() const { return static_cast<bool>(inverse_); }
  const CoordMap& inverse() const {
    if (!inverse_) throw std::invalid_argument("CoordMap has no inverse attached");
    return *inverse_;
  }
  CoordMap with_inverse(const CoordMap& inv) const {
    CoordMap r = *this;
    r.inverse_ = std::make_shared<const CoordMap>(inv);
    return r;
  }

 private:
  Rectangle domain_;
  std::shared_ptr<const JetMap> fn_;
  std::shared_ptr<const CoordMap> inverse_;
};

/// outer o inner, on inner's domain.
inline CoordMap compose(const CoordMap& outer, const CoordMap& inner) {
  CoordMap r(inner.domain(), [outer, inner](const Jet& x, const Jet& y) {
    const auto v = inner.jet(x, y);
    return outer.jet(v[0], v[1]);
  });
  if (outer.has_inverse() && inner.has_inverse()) {
    r = r.with_inverse(compose(inner.inverse(), outer.inverse()));
  }
  return r;
}

/// f o theta, on theta's domain.
inline ScalarField pullback(const ScalarField& f, const CoordMap& theta) {
  return {theta.domain(),
          [f, theta](const Jet& x, const Jet& y) {
            const auto v = theta.jet(x, y);
            return f.jet(v[0], v[1]);
          },
          f.backend()};
}

inline std::optional<Matrix2> invert(const Matrix2& m) {
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double scale = std::abs(m[0][0]) + std::abs(m[0][1]) + std::abs(m[1][0]) + std::abs(m[1][1]);
  if (!(std::abs(det) > 1e-14 * scale * scale)) return std::nullopt;
  return Matrix2{{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

/**
 * Inverse of theta on `target` by Newton's method from `guess(q)`. Jets are
 * refined with a frozen Jacobian, one order per sweep.
 */
inline CoordMap newton_inverse(const CoordMap& theta, const Rectangle& target,
                               std::function<Point(const Point&)> guess = {}) {
  return {target, [theta, guess](const Jet& X, const Jet& Y) {
            const Point q{X.value().real(), Y.value().real()};
            Point p = guess ? guess(q) : q;
            Matrix2 jinv{};
            bool converged = false;
            for (int it = 0; it < 60; ++it) {
              const Point v = theta(p);
              const double rx = v.x - q.x, ry = v.y - q.y;
              const auto inv = invert(theta.jacobian(p));
              if (!inv) throw DegenerateError("newton_inverse: singular Jacobian");
              jinv = *inv;
              const double dx = jinv[0][0] * rx + jinv[0][1] * ry;
              const double dy = jinv[1][0] * rx + jinv[1][1] * ry;
              p = {p.x - dx, p.y - dy};
              if (std::hypot(dx, dy) <= 1e-15 * (1.0 + norm(p))) {
                converged = true;
                break;
              }
            }
            if (!converged) throw DomainError("newton_inverse: no convergence");
            const auto inv = invert(theta.jacobian(p));
            if (!inv) throw DegenerateError("newton_inverse: singular Jacobian");
            jinv = *inv;
            const int n = std::min(X.order(), Y.order());
            Jet px(n, p.x), py(n, p.y);
            for (int sweep = 0; sweep < n; ++sweep) {
              const auto v = theta.jet(px, py);
              const Jet rx = v[0] - X, ry = v[1] - Y;
              px -= jinv[0][0] * rx + jinv[0][1] * ry;
              py -= jinv[1][0] * rx + jinv[1][1] * ry;
            }
            return CoordMap::JetPair{px, py};
          }};
}

}  // namespace bnn

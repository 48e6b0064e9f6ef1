#pragma once

/**
 * @file polar.hpp
 * @brief The polar map g(x, y) = x e^{iy} and pushforwards through it.
 *
 * g is used with negative radii: it is total on R^2, collapses the line
 * {x = 0} to the origin and satisfies g o sigma = g for
 * sigma(x, y) = (-x, y + pi). Functions invariant under sigma descend
 * through g; flat ones descend to smooth functions flat at 0.
 */

#include <numbers>

#include "bnn/bgeom.hpp"

namespace bnn {

/// g(x, y) = (x cos y, x sin y). `orientation` = -1 gives x e^{-iy}, used
/// only to inject faults into the verification suite.
inline CoordMap polar_map(int orientation = 1) {
  const double o = orientation;
  return {Rectangle::plane(), [o](const Jet& x, const Jet& y) {
            return CoordMap::JetPair{x * cos(o * y), x * sin(o * y)};
          }};
}

/// g as a complex-valued field x e^{iy}.
inline ScalarField polar_function(int orientation = 1) {
  const double o = orientation;
  return {Rectangle::plane(), [o](const Jet& x, const Jet& y) { return x * exp(I * o * y); }};
}

inline Point sigma(const Point& p) { return {-p.x, p.y + std::numbers::pi}; }

inline constexpr double kSigmaTolerance = 1e-10;

/// Largest |f(sigma(p)) - f(p)| over seeded samples in [-1, 1] x [-4, 4].
inline double sigma_defect(const ScalarField& f, std::uint64_t seed = 7, std::size_t count = 64) {
  double worst = 0.0;
  for (const auto& p : random_points(Rectangle(-1.0, 1.0, -4.0, 4.0), count, seed)) {
    worst = std::max(worst, std::abs(f(sigma(p)) - f(p)));
  }
  return worst;
}

/// A field carrying a checked certificate that f o sigma = f.
class SigmaInvariantField {
 public:
  static SigmaInvariantField certify(const ScalarField& f) {
    const double defect = sigma_defect(f);
    if (!(defect <= kSigmaTolerance)) {
      throw PreconditionError("field is not sigma-invariant (defect " + std::to_string(defect) + ")");
    }
    return SigmaInvariantField(f, defect);
  }

  const ScalarField& field() const { return field_; }
  double certificate() const { return defect_; }

 private:
  SigmaInvariantField(ScalarField f, double defect) : field_(std::move(f)), defect_(defect) {}
  ScalarField field_;
  double defect_;
};

/**
 * chi * gamma on the fundamental strip |y| < pi/2, extended by
 * gamma(x, y + m pi) = gamma((-1)^m x, y). chi is a plateau in y supported
 * in (-pi/2 + width, pi/2 - width) and equal to one on |y| <= pi/2 - 2 width.
 */
inline SigmaInvariantField periodize(const ScalarField& gamma, double cutoff_width) {
  if (!(cutoff_width > 0.0) || cutoff_width >= std::numbers::pi / 4) {
    throw std::invalid_argument("periodize: cutoff width must lie in (0, pi/4)");
  }
  constexpr double pi = std::numbers::pi;
  const double w = cutoff_width;
  ScalarField periodic(Rectangle::plane(), [gamma, w](const Jet& x, const Jet& y) {
    const int n = std::min(x.order(), y.order());
    const double m = std::round(y.value().real() / pi);
    const Jet yr = y - m * pi;
    const Jet chi = plateau(yr, -pi / 2 + w, pi / 2 - w, w);
    if (chi.is_zero()) return Jet(n, 0.0);
    const double s = (static_cast<long long>(m) % 2 == 0) ? 1.0 : -1.0;
    return chi * gamma.jet(s * x, yr);
  });
  return SigmaInvariantField::certify(periodic);
}

/// Radius below which descended flat functions are set to zero.
inline constexpr double kOriginCutoff = 1e-6;

/**
 * g_*(gamma) on C, evaluated through the section z -> (|z|, arg z).
 */
inline ScalarField pushforward_flat_function(const SigmaInvariantField& gamma) {
  const ScalarField f = gamma.field();
  return {Rectangle::plane(), [f](const Jet& x, const Jet& y) {
            const double r0 = std::hypot(x.value().real(), y.value().real());
            if (r0 < kOriginCutoff) return Jet(std::min(x.order(), y.order()), 0.0);
            const Jet r = sqrt(x * x + y * y);
            return f.jet(r, atan2(y, x));
          }};
}

/// g_*(L) = zbar d_zbar + g_*(gamma) z d_z for L = bd_zbar + gamma bd_z.
inline VectorField pushforward_b_frame(const SigmaInvariantField& gamma) {
  const ScalarField pushed = pushforward_flat_function(gamma);
  const ScalarField z = frames::z(), zb = frames::zbar();
  return {0.5 * (zb + pushed * z), 0.5 * I * (zb - pushed * z)};
}

/// Threshold below which gamma / zbar is set to zero.
inline constexpr double kDivisionCutoff = 1e-4;

/// max |gamma(z)| / |z|^4 over rings 0.005 <= |z| <= 0.05.
inline double flatness_defect(const ScalarField& gamma) {
  double worst = 0.0;
  for (int ir = 0; ir < 10; ++ir) {
    const double r = 0.005 + 0.005 * ir;
    for (int ia = 0; ia < 16; ++ia) {
      const double a = 2.0 * std::numbers::pi * ia / 16;
      worst = std::max(worst, std::abs(gamma(r * std::cos(a), r * std::sin(a))) / std::pow(r, 4));
    }
  }
  return worst;
}

/// gamma' with gamma = zbar * gamma', for gamma flat at the origin.
inline ScalarField divide_by_zbar(const ScalarField& gamma) {
  if (!(flatness_defect(gamma) <= 1.0)) {
    throw PreconditionError("divide_by_zbar: field is not flat at the origin");
  }
  return {gamma.domain(),
          [gamma](const Jet& x, const Jet& y) {
            const double r0 = std::hypot(x.value().real(), y.value().real());
            if (r0 < kDivisionCutoff) return Jet(std::min(x.order(), y.order()), 0.0);
            return gamma.jet(x, y) / (x - I * y);
          },
          gamma.backend()};
}

// ---------------------------------------------------------------------------
// Pushforward under g~ = g x id on R^{2n+2}.

/// coeff * prod_j z_j^{p_j} zbar_j^{q_j}, j = 1..n.
struct Monomial {
  cplx coeff = 1.0;
  std::vector<std::pair<int, int>> powers;

  cplx operator()(std::span<const cplx> z) const {
    cplx v = coeff;
    for (std::size_t j = 0; j < powers.size(); ++j) {
      v *= std::pow(z[j], powers[j].first) * std::pow(std::conj(z[j]), powers[j].second);
    }
    return v;
  }
};

/// c(x0, y0) * m(z_1, ..., z_n).
struct SeparableTerm {
  ScalarField c;
  Monomial m;
};

/**
 * Frame slots on R^{2n+2}: 0 = bd_zbar0, 1 = bd_z0, and for j >= 1
 * 2j = d_zbarj, 2j + 1 = d_zj. After pushforward slot 0 and 1 refer to
 * d_zbar0 and d_z0.
 */
struct GeneralVectorField {
  int n = 0;
  std::vector<std::vector<SeparableTerm>> slots;  // 2n + 2 entries

  static GeneralVectorField zero(int n) { return {n, std::vector<std::vector<SeparableTerm>>(2 * n + 2)}; }

  /// Coefficients of d/dx_0, d/dy_0, ..., d/dx_n, d/dy_n at a real point.
  std::vector<cplx> real_coefficients(std::span<const double> p) const {
    std::vector<cplx> out(2 * n + 2, 0.0);
    std::vector<cplx> zs(n);
    for (int j = 1; j <= n; ++j) zs[j - 1] = {p[2 * j], p[2 * j + 1]};
    const Point head{p[0], p[1]};
    for (int s = 0; s < 2 * n + 2; ++s) {
      cplx coef = 0.0;
      for (const auto& t : slots[s]) coef += t.c(head) * t.m(zs);
      if (coef == 0.0) continue;
      const int j = s / 2;
      const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
      const double dx_weight = (j == 0 && !pushed) ? p[0] : 1.0;
      out[2 * j] += 0.5 * coef * dx_weight;
      out[2 * j + 1] += 0.5 * sgn * I * coef;
    }
    return out;
  }

  /// True once the zeroth slots are the ordinary d_zbar0, d_z0.
  bool pushed = false;
};

/// g~(x0, y0, x1, y1, ...) = (x0 cos y0, x0 sin y0, x1, y1, ...).
inline std::vector<double> polar_map_general(std::span<const double> p) {
  std::vector<double> q(p.begin(), p.end());
  q[0] = p[0] * std::cos(p[1]);
  q[1] = p[0] * std::sin(p[1]);
  return q;
}

/**
 * g~_* of fields whose coefficients are sigma-invariant and flat on x0 = 0:
 * the coefficient c becomes g_*(c); bd_zbar0 becomes zbar0 d_zbar0 and
 * bd_z0 becomes z0 d_z0; the remaining slots pass through.
 */
inline std::vector<GeneralVectorField> pushforward_general(std::span<const GeneralVectorField> fields, int n) {
  std::vector<GeneralVectorField> out;
  for (const auto& f : fields) {
    if (f.n != n || static_cast<int>(f.slots.size()) != 2 * n + 2 || f.pushed) {
      throw std::invalid_argument("pushforward_general: field shape does not match n");
    }
    GeneralVectorField r = GeneralVectorField::zero(n);
    r.pushed = true;
    for (int s = 0; s < 2 * n + 2; ++s) {
      for (const auto& t : f.slots[s]) {
        if (!vanishes_on_axis(t.c)) throw PreconditionError("pushforward_general: coefficient not flat on x0 = 0");
        ScalarField c = pushforward_flat_function(SigmaInvariantField::certify(t.c));
        if (s == 0) c = c * frames::zbar();
        if (s == 1) c = c * frames::z();
        r.slots[s].push_back({c, t.m});
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

using GeneralTest = std::function<cplx(std::span<const double>)>;
using GeneralMap = std::function<std::vector<double>(std::span<const double>)>;

/**
 * Finite-difference relatedness check in R^m: for each test psi,
 * |W(psi)(theta(p)) - V(psi o theta)(p)|, derivatives by fourth-order
 * central differences with step h.
 */
inline Residual relatedness_residual_fd(const GeneralMap& theta, const GeneralVectorField& v,
                                        const GeneralVectorField& w, std::span<const GeneralTest> tests,
                                        std::span<const std::vector<double>> samples, double h = 1e-3) {
  if (samples.empty() || tests.empty()) throw std::invalid_argument("relatedness_residual_fd: empty input");
  auto directional = [h](const auto& fn, std::span<const double> p, std::span<const cplx> coeffs) {
    cplx acc = 0.0;
    std::vector<double> q(p.begin(), p.end());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      auto at = [&](double d) {
        q[k] = p[k] + d;
        const cplx v = fn(q);
        q[k] = p[k];
        return v;
      };
      const cplx deriv = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
      acc += coeffs[k] * deriv;
    }
    return acc;
  };
  Residual r;
  for (const auto& p : samples) {
    const auto q = theta(p);
    const auto vc = v.real_coefficients(p);
    const auto wc = w.real_coefficients(q);
    double worst = 0.0;
    for (const auto& psi : tests) {
      const cplx lhs = directional([&](std::span<const double> s) { return psi(s); }, q, wc);
      const cplx rhs = directional([&](std::span<const double> s) { return psi(theta(s)); }, p, vc);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    r.record(worst, {p[0], p[1]});
  }
  return r;
}

}  // namespace bnn

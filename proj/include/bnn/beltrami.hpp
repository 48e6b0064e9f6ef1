#pragma once

/**
 * @file beltrami.hpp
 * @brief Spectral solver for d_zbar h = nu d_z h on a doubly periodic grid.
 *
 * The unknown is written h = z + c zbar + phi with phi periodic. With
 * q = d_z phi the equation becomes the fixed point
 *
 *   q = S[nu (1 + q) - mean],   c = mean(nu (1 + q)),   phi = C[nu (1 + q) - c],
 *
 * where C inverts d_zbar on mean-zero periodic functions and S = d_z C is
 * the Beurling multiplier (k_x - i k_y) / (k_x + i k_y). Both are unitary
 * or smoothing in l^2, so the iteration contracts by sup |nu|.
 */

#include <numeric>

#include "bnn/bgeom.hpp"
#include "bnn/fft.hpp"
#include "bnn/grid_field.hpp"

namespace bnn {

/// Fourier multipliers of a doubly periodic N_x x N_y grid.
class PeriodicSpectrum {
 public:
  PeriodicSpectrum(int nx, int ny, const Rectangle& rect)
      : nx_(nx), ny_(ny), rect_(rect),
        fwd_(FftPlan::two_d(nx, ny, FftPlan::Direction::forward)),
        bwd_(FftPlan::two_d(nx, ny, FftPlan::Direction::backward)) {}

  void forward(std::vector<cplx>& v) const { fwd_.execute(v); }
  void backward(std::vector<cplx>& v) const {
    bwd_.execute(v);
    const double s = 1.0 / (static_cast<double>(nx_) * ny_);
    for (auto& x : v) x *= s;
  }

  bool dropped(int i, int j) const { return 2 * i == nx_ || 2 * j == ny_; }
  double kx(int i) const { return wavenumber(i, nx_, rect_.width()); }
  double ky(int j) const { return wavenumber(j, ny_, rect_.height()); }

  cplx d_zbar(int i, int j) const { return dropped(i, j) ? 0.0 : 0.5 * I * cplx(kx(i), ky(j)); }
  cplx d_z(int i, int j) const { return dropped(i, j) ? 0.0 : 0.5 * I * cplx(kx(i), -ky(j)); }
  cplx d_x(int i, int j) const { return dropped(i, j) ? 0.0 : I * kx(i); }
  cplx d_y(int i, int j) const { return dropped(i, j) ? 0.0 : I * ky(j); }
  /// Inverse of d_zbar on mean-zero data.
  cplx cauchy(int i, int j) const {
    if ((i == 0 && j == 0) || dropped(i, j)) return 0.0;
    return 1.0 / d_zbar(i, j);
  }
  cplx beurling(int i, int j) const {
    if ((i == 0 && j == 0) || dropped(i, j)) return 0.0;
    return cplx(kx(i), -ky(j)) / cplx(kx(i), ky(j));
  }

  /// IFFT(m(i, j) * spectrum).
  template <class Multiplier>
  std::vector<cplx> apply(const std::vector<cplx>& spectrum, Multiplier m) const {
    std::vector<cplx> out(spectrum.size());
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * ny_ + j;
        out[k] = m(i, j) * spectrum[k];
      }
    backward(out);
    return out;
  }

 private:
  int nx_, ny_;
  Rectangle rect_;
  FftPlan fwd_, bwd_;
};

namespace detail {
inline void require_doubly_periodic(const GridField& f) {
  if (!f.periodic_x() || !f.periodic_y()) throw std::invalid_argument("grid must be periodic in x and y");
}

/// max |f| over nodes within 10% of the side length of the boundary,
/// relative to max |f|.
inline double margin_defect(const GridField& f) {
  const double mx = 0.1 * f.rect().width(), my = 0.1 * f.rect().height();
  double edge = 0.0;
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j) {
      const Point p = f.node(i, j);
      const bool in_margin = p.x < f.rect().x_min() + mx || p.x > f.rect().x_max() - mx ||
                             p.y < f.rect().y_min() + my || p.y > f.rect().y_max() - my;
      if (in_margin) edge = std::max(edge, std::abs(f(i, j)));
    }
  const double peak = f.max_abs();
  return peak == 0.0 ? 0.0 : edge / peak;
}

inline constexpr double kMarginTolerance = 1e-10;

inline cplx mean(const std::vector<cplx>& v) {
  return std::accumulate(v.begin(), v.end(), cplx(0.0)) / static_cast<double>(v.size());
}
}  // namespace detail

/**
 * Solid Cauchy transform on the periodic grid: returns mean(f) zbar + phi
 * with phi periodic and d_zbar phi = f - mean(f), so that d_zbar of the
 * result is f. f must vanish in the 10% boundary margin.
 */
inline GridField cauchy_transform(const GridField& f) {
  detail::require_doubly_periodic(f);
  if (detail::margin_defect(f) > detail::kMarginTolerance) {
    throw PreconditionError("cauchy_transform: data is not compactly supported away from the boundary");
  }
  const PeriodicSpectrum spec(f.nx(), f.ny(), f.rect());
  std::vector<cplx> s = f.values();
  const cplx m = detail::mean(s);
  spec.forward(s);
  const auto phi = spec.apply(s, [&](int i, int j) { return spec.cauchy(i, j); });
  GridField out = f.like();
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j) {
      const Point p = f.node(i, j);
      out(i, j) = m * cplx(p.x, -p.y) + phi[static_cast<std::size_t>(i) * f.ny() + j];
    }
  return out;
}

struct BeltramiProblem {
  GridField nu;
  double sup_nu = 0.0;

  const Rectangle& rect() const { return nu.rect(); }

  static BeltramiProblem from_grid(GridField nu) {
    detail::require_doubly_periodic(nu);
    const double s = nu.max_abs();
    if (!(s < 1.0)) {
      throw EllipticityError("Beltrami coefficient violates ellipticity: sup|nu| = " + std::to_string(s));
    }
    return {std::move(nu), s};
  }

  /// Samples nu on an n x n doubly periodic grid over `rect`.
  static BeltramiProblem sample(const ScalarField& nu, int n, const Rectangle& rect) {
    return from_grid(GridField::sample(nu, n, n, rect, true, true));
  }
};

struct BeltramiOptions {
  int max_iter = 200;
  double tol = 1e-8;
  /// Both checks are disabled only for manufactured test problems.
  bool require_support = true;
  bool require_flat = true;
};

struct BeltramiSolution {
  /// Normalized h at the grid nodes.
  GridField h;
  /// |d_zbar h - nu d_z h| over nodes of the inner half-rectangle.
  Residual residual;
  int iterations = 0;
  bool converged = false;
  /// RMS change of q per iteration.
  std::vector<double> increments;

  /// h = (z + zbar_coeff * zbar + phi - offset) / scale.
  GridField phi;
  cplx zbar_coeff = 0.0;
  cplx offset = 0.0;
  cplx scale = 1.0;

  /// h as a field, phi interpolated spectrally-accurately on an 8-point stencil.
  ScalarField field() const {
    const ScalarField p = phi.to_field();
    const cplx c = zbar_coeff, off = offset, sc = scale;
    return {phi.rect(),
            [p, c, off, sc](const Jet& x, const Jet& y) {
              return (x + I * y + c * (x - I * y) + p.jet(x, y) - off) / sc;
            },
            Backend::grid};
  }
};

namespace detail {
inline Rectangle inner_half(const Rectangle& r) { return r.scaled(0.5); }

/// max |nu(z)| / |z|^4 over nodes with 0 < |z| <= 0.05.
inline double grid_flatness_defect(const GridField& nu) {
  double worst = 0.0;
  for (int i = 0; i < nu.nx(); ++i)
    for (int j = 0; j < nu.ny(); ++j) {
      const double r = norm(nu.node(i, j));
      if (r > 0.0 && r <= 0.05) worst = std::max(worst, std::abs(nu(i, j)) / std::pow(r, 4));
    }
  return worst;
}
}  // namespace detail

/**
 * (h - h(0)) / d_x h(0), values and the x-derivative taken from the
 * 8-point interpolant of the grid.
 */
inline GridField normalize_solution(const GridField& h) {
  const ScalarField f = h.to_field();
  const Jet j = f.jet_at({0.0, 0.0}, 1);
  const cplx h0 = j.value(), d = j(1, 0);
  if (std::abs(d) < 1e-6) throw DegenerateError("normalize_solution: d_x h(0) vanishes");
  GridField out = h.like();
  for (std::size_t k = 0; k < h.values().size(); ++k) out.values()[k] = (h.values()[k] - h0) / d;
  return out;
}

inline BeltramiSolution beurling_iterate(const BeltramiProblem& problem, const BeltramiOptions& opts = {}) {
  const GridField& nu = problem.nu;
  if (!(problem.sup_nu < 1.0)) throw EllipticityError("Beltrami coefficient violates ellipticity");
  if (opts.require_support && detail::margin_defect(nu) > detail::kMarginTolerance) {
    throw PreconditionError("beurling_iterate: nu is not compactly supported in the grid rectangle");
  }
  if (opts.require_flat && !(detail::grid_flatness_defect(nu) <= 1.0)) {
    throw PreconditionError("beurling_iterate: nu is not flat at the origin");
  }
  const int nx = nu.nx(), ny = nu.ny();
  const std::size_t size = nu.values().size();
  const PeriodicSpectrum spec(nx, ny, nu.rect());
  const Rectangle inner = detail::inner_half(nu.rect());

  // Node closest to the origin, for the running normalization estimate.
  std::size_t origin_node = 0;
  {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        if (norm(nu.node(i, j)) < best) {
          best = norm(nu.node(i, j));
          origin_node = static_cast<std::size_t>(i) * ny + j;
        }
  }

  BeltramiSolution sol{.h = nu.like(), .residual = {}, .iterations = 0, .converged = false, .increments = {}, .phi = nu.like()};
  std::vector<cplx> q(size, 0.0), rhs(size), spectrum(size);
  cplx c = 0.0;

  auto residual_of = [&](const std::vector<cplx>& qn, const std::vector<cplx>& dzbar_phi, cplx cc, cplx scale) {
    Residual res;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const Point p = nu.node(i, j);
        if (!inner.contains(p)) continue;
        const std::size_t k = static_cast<std::size_t>(i) * ny + j;
        const cplx dzbar_h = cc + dzbar_phi[k];
        const cplx dz_h = 1.0 + qn[k];
        res.record(std::abs(dzbar_h - nu.values()[k] * dz_h) / std::abs(scale), p);
      }
    return res;
  };

  const bool trivial = nu.max_abs() == 0.0;
  if (!trivial) {
    for (int it = 1; it <= opts.max_iter; ++it) {
      for (std::size_t k = 0; k < size; ++k) rhs[k] = nu.values()[k] * (1.0 + q[k]);
      c = detail::mean(rhs);
      spectrum = rhs;
      spec.forward(spectrum);
      auto q_new = spec.apply(spectrum, [&](int i, int j) { return spec.beurling(i, j); });
      auto dzbar_phi = spec.apply(spectrum, [&](int i, int j) {
        return (i == 0 && j == 0) || spec.dropped(i, j) ? cplx(0.0) : cplx(1.0);
      });
      double inc = 0.0;
      for (std::size_t k = 0; k < size; ++k) inc += std::norm(q_new[k] - q[k]);
      sol.increments.push_back(std::sqrt(inc / static_cast<double>(size)));
      q = std::move(q_new);
      sol.iterations = it;
      const cplx scale_est = 1.0 + q[origin_node] + c + dzbar_phi[origin_node];
      sol.residual = residual_of(q, dzbar_phi, c, scale_est);
      if (sol.residual.max_abs <= opts.tol) {
        sol.converged = true;
        break;
      }
      // Fixed point reached; the remaining residual is discretization error.
      if (sol.increments.back() <= 1e-15) break;
    }
    for (std::size_t k = 0; k < size; ++k) rhs[k] = nu.values()[k] * (1.0 + q[k]);
    // phi solves d_zbar phi = rhs - c for the final q; its d_z is the next q.
    c = detail::mean(rhs);
    spectrum = rhs;
    spec.forward(spectrum);
    sol.phi.values() = spec.apply(spectrum, [&](int i, int j) { return spec.cauchy(i, j); });
  } else {
    sol.converged = true;
  }
  sol.zbar_coeff = c;

  // Normalize through the interpolant used by every later evaluation.
  sol.offset = 0.0;
  sol.scale = 1.0;
  const Jet raw = sol.field().jet_at({0.0, 0.0}, 1);
  if (std::abs(raw(1, 0)) < 1e-6) throw DegenerateError("beurling_iterate: degenerate normalization");
  sol.offset = raw.value();
  sol.scale = raw(1, 0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Point p = nu.node(i, j);
      sol.h(i, j) = (cplx(p.x, p.y) + c * cplx(p.x, -p.y) + sol.phi(i, j) - sol.offset) / sol.scale;
    }

  // Final residual of the stored solution, from spectral derivatives of phi.
  {
    std::vector<cplx> ph = sol.phi.values();
    spec.forward(ph);
    const auto dz = spec.apply(ph, [&](int i, int j) { return spec.d_z(i, j); });
    const auto dzb = spec.apply(ph, [&](int i, int j) { return spec.d_zbar(i, j); });
    sol.residual = residual_of(dz, dzb, c, sol.scale);
  }
  sol.converged = sol.residual.max_abs <= opts.tol;
  return sol;
}

/// nu = -gamma' z with gamma' = amplitude exp(-1/|z|^2) b(|z| / radius), b the standard bump.
inline ScalarField flat_bump_coefficient(double amplitude, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("flat_bump_coefficient: radius must be positive");
  return {Rectangle::plane(), [amplitude, radius](const Jet& x, const Jet& y) {
            const int n = std::min(x.order(), y.order());
            const Jet r2 = x * x + y * y;
            const double s2 = r2.value().real() / (radius * radius);
            if (s2 >= 1.0 - 1e-6 || r2.value().real() < 1e-12) return Jet(n, 0.0);
            const Jet s = r2 / (radius * radius);
            return -amplitude * exp(-1.0 / r2) * exp(1.0 - 1.0 / (1.0 - s)) * (x + I * y);
          }};
}

/// Ratios of successive increments while both exceed `floor`.
inline std::vector<double> contraction_ratios(const BeltramiSolution& s, double floor = 1e-13) {
  std::vector<double> out;
  for (std::size_t k = 1; k < s.increments.size(); ++k) {
    if (s.increments[k - 1] <= floor || s.increments[k] <= floor) break;
    out.push_back(s.increments[k] / s.increments[k - 1]);
  }
  return out;
}

}  // namespace bnn

#pragma once

/**
 * @file grid_field.hpp
 * @brief Sampled complex fields on rectangular grids.
 *
 * Node layout: along a periodic axis the nodes are x_min + i * w / n for
 * i < n (the right edge is the image of the left one); along a
 * non-periodic axis they are x_min + i * w / (n - 1), endpoints included.
 * Values are stored row-major with x as the slow index.
 */

#include <cmath>
#include <vector>

#include "bnn/fft.hpp"
#include "bnn/fields.hpp"

namespace bnn {

class GridField {
 public:
  GridField(int nx, int ny, Rectangle rect, bool periodic_y, bool periodic_x = false)
      : nx_(nx), ny_(ny), rect_(rect), periodic_y_(periodic_y), periodic_x_(periodic_x),
        values_(static_cast<std::size_t>(nx) * ny, 0.0) {
    if (nx < 5 || ny < 5) throw std::invalid_argument("GridField needs at least 5 nodes per axis");
    if (!rect.is_finite()) throw std::invalid_argument("GridField needs a finite rectangle");
  }

  /// Samples f at every node.
  static GridField sample(const ScalarField& f, int nx, int ny, const Rectangle& rect,
                          bool periodic_y, bool periodic_x = false) {
    GridField g(nx, ny, rect, periodic_y, periodic_x);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) g(i, j) = f(g.node(i, j));
    return g;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Rectangle& rect() const { return rect_; }
  bool periodic_x() const { return periodic_x_; }
  bool periodic_y() const { return periodic_y_; }

  double hx() const { return rect_.width() / (periodic_x_ ? nx_ : nx_ - 1); }
  double hy() const { return rect_.height() / (periodic_y_ ? ny_ : ny_ - 1); }
  double node_x(int i) const { return rect_.x_min() + i * hx(); }
  double node_y(int j) const { return rect_.y_min() + j * hy(); }
  Point node(int i, int j) const { return {node_x(i), node_y(j)}; }

  cplx& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  const cplx& operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  GridField like() const { return GridField(nx_, ny_, rect_, periodic_y_, periodic_x_); }

  /// Fourth-order centered differences in x; one-sided fourth order at
  /// non-periodic edges.
  GridField derivative_x() const {
    GridField out = like();
    const double h = hx();
    for (int j = 0; j < ny_; ++j) {
      auto at = [&](int i) { return (*this)(i, j); };
      for (int i = 0; i < nx_; ++i) out(i, j) = fd4(at, i, nx_, h, periodic_x_);
    }
    return out;
  }

  /// Spectral in y when periodic in y, fourth-order differences otherwise.
  GridField derivative_y() const {
    GridField out = like();
    if (periodic_y_) {
      out.values_ = values_;
      const auto fwd = FftPlan::rows(nx_, ny_, FftPlan::Direction::forward);
      const auto bwd = FftPlan::rows(nx_, ny_, FftPlan::Direction::backward);
      fwd.execute(out.values_);
      for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) out(i, j) *= I * wavenumber(j, ny_, rect_.height()) / double(ny_);
      bwd.execute(out.values_);
      return out;
    }
    const double h = hy();
    for (int i = 0; i < nx_; ++i) {
      auto at = [&](int j) { return (*this)(i, j); };
      for (int j = 0; j < ny_; ++j) out(i, j) = fd4(at, j, ny_, h, false);
    }
    return out;
  }

  /**
   * Field view through tensor-product Lagrange interpolation on a `stencil`
   * point window (wrapped on periodic axes). Reproduces node values exactly;
   * derivatives of any order come from the local interpolant.
   */
  ScalarField to_field(int stencil = 8) const {
    if (stencil > nx_ || stencil > ny_) throw std::invalid_argument("stencil wider than grid");
    auto data = std::make_shared<const GridField>(*this);
    return {rect_,
            [data, stencil](const Jet& X, const Jet& Y) { return data->interpolate(X, Y, stencil); },
            Backend::grid};
  }

  Jet interpolate(const Jet& X, const Jet& Y, int stencil) const {
    constexpr int kMaxStencil = 12;
    if (stencil > kMaxStencil) throw std::invalid_argument("stencil too wide");
    std::array<Jet, kMaxStencil> bx, by;
    std::array<int, kMaxStencil> ix, iy;
    lagrange_window(X, rect_.x_min(), hx(), nx_, periodic_x_, stencil, bx, ix);
    lagrange_window(Y, rect_.y_min(), hy(), ny_, periodic_y_, stencil, by, iy);
    const int n = std::min(X.order(), Y.order());
    Jet acc(n, 0.0);
    for (int a = 0; a < stencil; ++a) {
      Jet row(n, 0.0);
      for (int b = 0; b < stencil; ++b) row.add_scaled(by[b], (*this)(ix[a], iy[b]));
      acc += bx[a] * row;
    }
    return acc;
  }

 private:
  template <class At>
  static cplx fd4(const At& at, int i, int n, double h, bool periodic) {
    auto w = [&](int k) { return at(((k % n) + n) % n); };
    if (periodic || (i >= 2 && i <= n - 3)) {
      return (w(i - 2) - 8.0 * w(i - 1) + 8.0 * w(i + 1) - w(i + 2)) / (12.0 * h);
    }
    if (i == 0) return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
    if (i == 1) return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h);
    if (i == n - 1)
      return (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) + 3.0 * at(n - 5)) / (12.0 * h);
    return (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) - at(n - 5)) / (12.0 * h);
  }

  template <class Basis, class Index>
  static void lagrange_window(const Jet& X, double origin, double h, int n, bool periodic,
                              int m, Basis& basis, Index& index) {
    const double t0 = (X.value().real() - origin) / h;
    int i0 = static_cast<int>(std::floor(t0)) - m / 2 + 1;
    if (!periodic) i0 = std::clamp(i0, 0, n - m);
    Jet u = (X - origin) / h - static_cast<double>(i0);
    const int order = X.order();
    std::array<Jet, 13> prefix, suffix;
    prefix[0] = Jet(order, 1.0);
    for (int k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * (u - double(k));
    suffix[m] = Jet(order, 1.0);
    for (int k = m - 1; k >= 0; --k) suffix[k] = (u - double(k)) * suffix[k + 1];
    const double u0 = u.value().real();
    const double nearest = std::round(u0);
    const bool on_node = std::abs(u0 - nearest) <= 1e-12 * (1.0 + std::abs(u0));
    for (int k = 0; k < m; ++k) {
      double denom = 1.0;
      for (int j = 0; j < m; ++j)
        if (j != k) denom *= double(k - j);
      basis[k] = prefix[k] * suffix[k + 1] / denom;
      if (on_node) basis[k].at(0) = (k == static_cast<int>(nearest)) ? 1.0 : 0.0;
      index[k] = periodic ? (((i0 + k) % n) + n) % n : i0 + k;
    }
  }

  int nx_, ny_;
  Rectangle rect_;
  bool periodic_y_, periodic_x_;
  std::vector<cplx> values_;
};

}  // namespace bnn

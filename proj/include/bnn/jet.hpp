#pragma once

/**
 * @file jet.hpp
 * @brief Truncated bivariate Taylor series with complex coefficients.
 *
 * A Jet of order K at a point (x0, y0) stores the Taylor coefficients
 * c(i, j) of dx^i dy^j for i + j <= K. Arithmetic on jets is forward-mode
 * differentiation in two real variables: evaluating a formula on the two
 * seed jets X = x0 + dx and Y = y0 + dy yields every partial derivative of
 * the formula up to order K.
 *
 * Elementary functions are applied by composing the univariate Taylor
 * expansion of the function at the constant term with the nilpotent part,
 * so each function only has to supply its derivatives at one point.
 */

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace bnn {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

class Jet {
 public:
  static constexpr int kMaxOrder = 8;
  static constexpr std::size_t kCapacity =
      (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  Jet() = default;

  explicit Jet(int order, cplx value = 0.0) : order_(order) {
    if (order < 0 || order > kMaxOrder) {
      throw std::invalid_argument("Jet order out of range");
    }
    c_.fill(0.0);
    c_[0] = value;
  }

  /// Seed jet for the first (which == 0) or second (which == 1) variable.
  static Jet variable(int order, double at, int which) {
    Jet j(order, at);
    if (order >= 1) j.c_[which == 0 ? 1 : 2] = 1.0;
    return j;
  }

  static constexpr std::size_t index(int i, int j) {
    const int d = i + j;
    return static_cast<std::size_t>(d * (d + 1) / 2 + j);
  }
  static constexpr std::size_t size_for(int order) {
    return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
  }

  int order() const { return order_; }
  std::size_t size() const { return size_for(order_); }

  cplx& operator()(int i, int j) { return c_[index(i, j)]; }
  const cplx& operator()(int i, int j) const { return c_[index(i, j)]; }
  cplx& at(std::size_t k) { return c_[k]; }
  const cplx& at(std::size_t k) const { return c_[k]; }

  cplx value() const { return c_[0]; }

  /// Partial derivative d^{i+j} / dx^i dy^j at the expansion point.
  cplx derivative(int i, int j) const {
    if (i + j > order_) throw std::out_of_range("derivative above jet order");
    return c_[index(i, j)] * (factorial(i) * factorial(j));
  }

  /// Series of the x-partial, one order lower.
  Jet dx() const {
    if (order_ == 0) throw std::out_of_range("dx of an order-0 jet");
    Jet r(order_ - 1);
    for (int d = 0; d <= order_ - 1; ++d)
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        r(i, j) = (*this)(i + 1, j) * static_cast<double>(i + 1);
      }
    return r;
  }

  Jet dy() const {
    if (order_ == 0) throw std::out_of_range("dy of an order-0 jet");
    Jet r(order_ - 1);
    for (int d = 0; d <= order_ - 1; ++d)
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        r(i, j) = (*this)(i, j + 1) * static_cast<double>(j + 1);
      }
    return r;
  }

  Jet truncated(int order) const {
    Jet r(order);
    const std::size_t n = size_for(std::min(order, order_));
    for (std::size_t k = 0; k < n; ++k) r.c_[k] = c_[k];
    return r;
  }

  bool is_zero() const {
    for (std::size_t k = 0; k < size(); ++k)
      if (c_[k] != 0.0) return false;
    return true;
  }

  /// Coefficient-wise real part; a jet of a real function of real variables.
  Jet real() const {
    Jet r(order_);
    for (std::size_t k = 0; k < size(); ++k) r.c_[k] = c_[k].real();
    return r;
  }
  Jet imag() const {
    Jet r(order_);
    for (std::size_t k = 0; k < size(); ++k) r.c_[k] = c_[k].imag();
    return r;
  }
  Jet conj() const {
    Jet r(order_);
    for (std::size_t k = 0; k < size(); ++k) r.c_[k] = std::conj(c_[k]);
    return r;
  }

  Jet operator-() const {
    Jet r(order_);
    for (std::size_t k = 0; k < size(); ++k) r.c_[k] = -c_[k];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    align(o);
    for (std::size_t k = 0; k < size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    align(o);
    for (std::size_t k = 0; k < size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator+=(cplx s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(cplx s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(cplx s) {
    for (std::size_t k = 0; k < size(); ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator/=(cplx s) {
    for (std::size_t k = 0; k < size(); ++k) c_[k] /= s;
    return *this;
  }

  /// this += s * o, without a temporary.
  void add_scaled(const Jet& o, cplx s) {
    align(o);
    for (std::size_t k = 0; k < size(); ++k) c_[k] += s * o.c_[k];
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.order_, b.order_);
    Jet r(n);
    if (n == 0) {
      r.c_[0] = a.c_[0] * b.c_[0];
      return r;
    }
    for (int da = 0; da <= n; ++da)
      for (int ja = 0; ja <= da; ++ja) {
        const cplx ca = a.c_[index(da - ja, ja)];
        if (ca == 0.0) continue;
        for (int db = 0; db <= n - da; ++db)
          for (int jb = 0; jb <= db; ++jb)
            r.c_[index(da - ja + db - jb, ja + jb)] +=
                ca * b.c_[index(db - jb, jb)];
      }
    return r;
  }

  static double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

 private:
  // Mixed-order arithmetic truncates to the lower order.
  void align(const Jet& o) {
    if (o.order_ < order_) order_ = o.order_;
  }

  int order_ = 0;
  std::array<cplx, kCapacity> c_{};
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator+(Jet a, cplx s) { return a += s; }
inline Jet operator+(cplx s, Jet a) { return a += s; }
inline Jet operator-(Jet a, cplx s) { return a -= s; }
inline Jet operator-(cplx s, const Jet& a) { return (-a) += s; }
inline Jet operator*(Jet a, cplx s) { return a *= s; }
inline Jet operator*(cplx s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, cplx s) { return a /= s; }
inline Jet operator+(Jet a, double s) { return a += cplx(s); }
inline Jet operator+(double s, Jet a) { return a += cplx(s); }
inline Jet operator-(Jet a, double s) { return a -= cplx(s); }
inline Jet operator-(double s, const Jet& a) { return (-a) += cplx(s); }
inline Jet operator*(Jet a, double s) { return a *= cplx(s); }
inline Jet operator*(double s, Jet a) { return a *= cplx(s); }
inline Jet operator/(Jet a, double s) { return a /= cplx(s); }

/// Sum_k coeffs[k] * (u - u(0))^k, i.e. f(u) for f with Taylor
/// coefficients `coeffs` at u's constant term. coeffs.size() > u.order().
template <class Coeffs>
Jet compose(const Jet& u, const Coeffs& coeffs) {
  const int n = u.order();
  Jet r(n, coeffs[0]);
  if (n == 0) return r;
  Jet du = u;
  du.at(0) = 0.0;
  Jet power = du;
  for (int k = 1; k <= n; ++k) {
    r.add_scaled(power, coeffs[k]);
    if (k < n) power = power * du;
  }
  return r;
}

namespace detail {
using CoeffArray = std::array<cplx, Jet::kMaxOrder + 1>;
}

inline Jet exp(const Jet& u) {
  detail::CoeffArray c{};
  const cplx e = std::exp(u.value());
  for (int k = 0; k <= u.order(); ++k) c[k] = e / Jet::factorial(k);
  return compose(u, c);
}

inline Jet sin(const Jet& u) {
  detail::CoeffArray c{};
  const cplx s = std::sin(u.value()), co = std::cos(u.value());
  const cplx cycle[4] = {s, co, -s, -co};
  for (int k = 0; k <= u.order(); ++k) c[k] = cycle[k % 4] / Jet::factorial(k);
  return compose(u, c);
}

inline Jet cos(const Jet& u) {
  detail::CoeffArray c{};
  const cplx s = std::sin(u.value()), co = std::cos(u.value());
  const cplx cycle[4] = {co, -s, -co, s};
  for (int k = 0; k <= u.order(); ++k) c[k] = cycle[k % 4] / Jet::factorial(k);
  return compose(u, c);
}

inline Jet reciprocal(const Jet& u) {
  const cplx u0 = u.value();
  if (u0 == 0.0) throw std::domain_error("Jet reciprocal of zero");
  detail::CoeffArray c{};
  cplx p = 1.0 / u0;
  for (int k = 0; k <= u.order(); ++k) {
    c[k] = p;
    p *= -1.0 / u0;
  }
  return compose(u, c);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(cplx s, const Jet& b) { return reciprocal(b) * s; }
inline Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

/// Principal branch of log.
inline Jet log(const Jet& u) {
  const cplx u0 = u.value();
  if (u0 == 0.0) throw std::domain_error("Jet log of zero");
  detail::CoeffArray c{};
  c[0] = std::log(u0);
  cplx p = 1.0 / u0;
  for (int k = 1; k <= u.order(); ++k) {
    c[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / static_cast<double>(k);
    p /= u0;
  }
  return compose(u, c);
}

/// Principal branch of u^p.
inline Jet pow(const Jet& u, double p) {
  const cplx u0 = u.value();
  detail::CoeffArray c{};
  if (u0 == 0.0) {
    if (u.order() == 0 && p > 0) return Jet(0, 0.0);
    throw std::domain_error("Jet pow at zero");
  }
  const cplx base = std::pow(u0, p);
  double binom = 1.0;
  cplx ipow = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    c[k] = binom * base * ipow;
    binom *= (p - k) / (k + 1);
    ipow /= u0;
  }
  return compose(u, c);
}

inline Jet pow(const Jet& u, int n) {
  if (n < 0) return reciprocal(pow(u, -n));
  Jet r(u.order(), 1.0);
  Jet b = u;
  while (n > 0) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n > 0) b = b * b;
  }
  return r;
}

inline Jet sqrt(const Jet& u) { return pow(u, 0.5); }

inline Jet tan(const Jet& u) { return sin(u) / cos(u); }

/// atan via the logarithmic form; principal branch for real-valued input.
inline Jet atan(const Jet& u) {
  return (log(1.0 + I * u) - log(1.0 - I * u)) / (2.0 * I);
}

/// Angle of (x, y) for real-valued jets; requires (x, y) != 0 at the base point.
inline Jet atan2(const Jet& y, const Jet& x) {
  const double x0 = x.value().real(), y0 = y.value().real();
  const double r2 = x0 * x0 + y0 * y0;
  if (r2 == 0.0) throw std::domain_error("Jet atan2 at origin");
  // atan2(y, x) = theta0 + atan((x0 y - y0 x) / (x0 x + y0 y)).
  Jet num = x0 * y - y0 * x;
  num.at(0) = 0.0;
  Jet t = atan(num / (x0 * x + y0 * y));
  t.at(0) = std::atan2(y0, x0);
  return t;
}

}  // namespace bnn

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bnn/errors.hpp"

namespace bnn {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double norm(const Point& p) { return std::hypot(p.x, p.y); }

class Rectangle {
 public:
  Rectangle(double x_min, double x_max, double y_min, double y_max)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (!(x_min < x_max) || !(y_min < y_max)) {
      throw std::invalid_argument("Rectangle requires x_min < x_max and y_min < y_max");
    }
  }

  static Rectangle plane() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf, -inf, inf};
  }
  static Rectangle square(double half_width) {
    return {-half_width, half_width, -half_width, half_width};
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }

  /// Closed containment with a relative slack of a few ulps for mapped points.
  bool contains(const Point& p) const {
    return within(p.x, x_min_, x_max_) && within(p.y, y_min_, y_max_);
  }

  bool is_finite() const {
    return std::isfinite(x_min_) && std::isfinite(x_max_) &&
           std::isfinite(y_min_) && std::isfinite(y_max_);
  }

  Rectangle intersect(const Rectangle& o) const {
    return {std::max(x_min_, o.x_min_), std::min(x_max_, o.x_max_),
            std::max(y_min_, o.y_min_), std::min(y_max_, o.y_max_)};
  }

  /// Same center, half-widths scaled by `factor`.
  Rectangle scaled(double factor) const {
    const double cx = 0.5 * (x_min_ + x_max_), cy = 0.5 * (y_min_ + y_max_);
    const double hx = 0.5 * width() * factor, hy = 0.5 * height() * factor;
    return {cx - hx, cx + hx, cy - hy, cy + hy};
  }

  std::string str() const {
    std::ostringstream os;
    os << "[" << x_min_ << ", " << x_max_ << "] x [" << y_min_ << ", " << y_max_ << "]";
    return os.str();
  }

  bool operator==(const Rectangle&) const = default;

 private:
  static bool within(double v, double lo, double hi) {
    const double slack = 1e-12 * (1.0 + std::max(std::abs(std::isfinite(lo) ? lo : 0.0),
                                                 std::abs(std::isfinite(hi) ? hi : 0.0)));
    return v >= lo - slack && v <= hi + slack;
  }

  double x_min_, x_max_, y_min_, y_max_;
};

inline void require_in(const Rectangle& r, const Point& p, const char* what) {
  if (!r.contains(p)) {
    std::ostringstream os;
    os << what << ": point (" << p.x << ", " << p.y << ") outside domain " << r.str();
    throw DomainError(os.str());
  }
}

/// Seeded uniform samples in `r`, optionally excluding the strip |x| < strip.
inline std::vector<Point> random_points(const Rectangle& r, std::size_t count,
                                        std::uint64_t seed, double strip = 0.0) {
  if (!r.is_finite()) throw std::invalid_argument("random_points needs a finite rectangle");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(r.x_min(), r.x_max());
  std::uniform_real_distribution<double> uy(r.y_min(), r.y_max());
  std::vector<Point> pts;
  pts.reserve(count);
  std::size_t attempts = 0;
  while (pts.size() < count) {
    if (++attempts > 1000 * count + 1000) {
      throw std::invalid_argument("random_points: strip excludes the whole rectangle");
    }
    Point p{ux(rng), uy(rng)};
    if (std::abs(p.x) < strip) continue;
    pts.push_back(p);
  }
  return pts;
}

/// Samples with |x| in [x_lo, x_hi] (random sign) and |y| <= y_hi.
inline std::vector<Point> random_points_off_axis(double x_lo, double x_hi, double y_hi,
                                                 std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x_lo, x_hi);
  std::uniform_real_distribution<double> uy(-y_hi, y_hi);
  std::bernoulli_distribution sign(0.5);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = ux(rng);
    pts.push_back({sign(rng) ? x : -x, uy(rng)});
  }
  return pts;
}

}  // namespace bnn

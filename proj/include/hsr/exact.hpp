#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <utility>

namespace hsr {

using Int = mpz_class;
using Rational = mpq_class;

/// num / den in lowest terms (mpq_class's two-argument constructor does not reduce).
inline Rational ratio(const Int& num, const Int& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Tracks how many real-valued cells are alive in the core pipeline.
///
/// Every HPoint and Line registers its three coordinates on construction and
/// releases them on destruction, so `peak()` is the high-water mark of
/// simultaneously live reals. Input coordinates and output buffers do not go
/// through these types and are not counted.
class RealCells {
 public:
  static void acquire(std::size_t n) {
    live_ += n;
    if (live_ > peak_) peak_ = live_;
  }
  static void release(std::size_t n) { live_ -= n; }
  static std::size_t live() { return live_; }
  static std::size_t peak() { return peak_; }
  /// Starts a new measurement window: the peak restarts from the current live count.
  static void reset_peak() { peak_ = live_; }

 private:
  static thread_local std::size_t live_;
  static thread_local std::size_t peak_;
};

/// Point of the projection plane in homogeneous coordinates (x : y : w), w > 0.
class HPoint {
 public:
  HPoint() : HPoint(Int(0), Int(0), Int(1)) {}
  HPoint(Int x, Int y, Int w) : x_(std::move(x)), y_(std::move(y)), w_(std::move(w)) {
    RealCells::acquire(3);
    if (sgn(w_) < 0) {
      x_ = -x_;
      y_ = -y_;
      w_ = -w_;
    }
  }
  HPoint(const HPoint& o) : x_(o.x_), y_(o.y_), w_(o.w_) { RealCells::acquire(3); }
  HPoint(HPoint&& o) noexcept : x_(std::move(o.x_)), y_(std::move(o.y_)), w_(std::move(o.w_)) {
    RealCells::acquire(3);
  }
  HPoint& operator=(const HPoint&) = default;
  HPoint& operator=(HPoint&&) = default;
  ~HPoint() { RealCells::release(3); }

  const Int& x() const { return x_; }
  const Int& y() const { return y_; }
  const Int& w() const { return w_; }

  Rational rx() const { return ratio(x_, w_); }
  Rational ry() const { return ratio(y_, w_); }
  double dx() const;
  double dy() const;

  friend bool operator==(const HPoint& a, const HPoint& b) {
    return a.x_ * b.w_ == b.x_ * a.w_ && a.y_ * b.w_ == b.y_ * a.w_;
  }

 private:
  Int x_, y_, w_;
};

/// Line a*x + b*y + c*w = 0 of the projection plane.
class Line {
 public:
  Line(Int a, Int b, Int c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    RealCells::acquire(3);
  }
  Line(const Line& o) : a_(o.a_), b_(o.b_), c_(o.c_) { RealCells::acquire(3); }
  Line(Line&& o) noexcept : a_(std::move(o.a_)), b_(std::move(o.b_)), c_(std::move(o.c_)) {
    RealCells::acquire(3);
  }
  Line& operator=(const Line&) = default;
  Line& operator=(Line&&) = default;
  ~Line() { RealCells::release(3); }

  const Int& a() const { return a_; }
  const Int& b() const { return b_; }
  const Int& c() const { return c_; }

 private:
  Int a_, b_, c_;
};

enum class Orientation { right = -1, collinear = 0, left = 1 };

/// Exact sign of the signed area of (a, b, c); left means counterclockwise.
Orientation orientation(const HPoint& a, const HPoint& b, const HPoint& c);

Line line_through(const HPoint& p, const HPoint& q);
/// Intersection of two lines; empty when they are parallel or identical.
std::optional<HPoint> meet(const Line& l1, const Line& l2);
/// Sign of l evaluated at p: which side of the line p is on.
int side(const Line& l, const HPoint& p);

/// Sign of (q - p) . (to - from): the order of p and q along the direction from -> to.
int compare_along(const HPoint& from, const HPoint& to, const HPoint& p, const HPoint& q);
/// Lexicographic (x, then y) comparison of two points.
int compare_xy(const HPoint& p, const HPoint& q);
int compare_x(const HPoint& p, const HPoint& q);
int compare_y(const HPoint& p, const HPoint& q);
HPoint midpoint(const HPoint& p, const HPoint& q);

/// True when p lies on the closed segment [a, b] (a != b).
bool on_segment(const HPoint& a, const HPoint& b, const HPoint& p);

/// Direction comparison around a common origin: orders vectors by angle in [0, 2*pi)
/// measured counterclockwise from the positive x axis. Directions are given as
/// endpoints seen from `origin`.
int compare_angle(const HPoint& origin, const HPoint& p, const HPoint& q);

}  // namespace hsr

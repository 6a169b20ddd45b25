#include "hsr/exact.hpp"

namespace hsr {

thread_local std::size_t RealCells::live_ = 0;
thread_local std::size_t RealCells::peak_ = 0;

double HPoint::dx() const { return Rational(x_, w_).get_d(); }
double HPoint::dy() const { return Rational(y_, w_).get_d(); }

namespace {

// Euclidean vector q - p, scaled by the positive factor p.w * q.w.
std::pair<Int, Int> diff(const HPoint& p, const HPoint& q) {
  return {q.x() * p.w() - p.x() * q.w(), q.y() * p.w() - p.y() * q.w()};
}

}  // namespace

Orientation orientation(const HPoint& a, const HPoint& b, const HPoint& c) {
  Int det = a.x() * (b.y() * c.w() - c.y() * b.w()) - a.y() * (b.x() * c.w() - c.x() * b.w()) +
            a.w() * (b.x() * c.y() - c.x() * b.y());
  return static_cast<Orientation>(sgn(det));
}

Line line_through(const HPoint& p, const HPoint& q) {
  return Line(p.y() * q.w() - p.w() * q.y(), p.w() * q.x() - p.x() * q.w(),
              p.x() * q.y() - p.y() * q.x());
}

std::optional<HPoint> meet(const Line& l1, const Line& l2) {
  Int w = l1.a() * l2.b() - l1.b() * l2.a();
  if (sgn(w) == 0) return std::nullopt;
  return HPoint(l1.b() * l2.c() - l1.c() * l2.b(), l1.c() * l2.a() - l1.a() * l2.c(), std::move(w));
}

int side(const Line& l, const HPoint& p) {
  Int v = l.a() * p.x() + l.b() * p.y() + l.c() * p.w();
  return sgn(v);
}

int compare_along(const HPoint& from, const HPoint& to, const HPoint& p, const HPoint& q) {
  auto [dx, dy] = diff(from, to);
  auto [ex, ey] = diff(p, q);
  Int dot = dx * ex + dy * ey;
  return sgn(dot);
}

int compare_x(const HPoint& p, const HPoint& q) {
  Int d = p.x() * q.w() - q.x() * p.w();
  return sgn(d);
}

int compare_y(const HPoint& p, const HPoint& q) {
  Int d = p.y() * q.w() - q.y() * p.w();
  return sgn(d);
}

int compare_xy(const HPoint& p, const HPoint& q) {
  const int c = compare_x(p, q);
  return c != 0 ? c : compare_y(p, q);
}

HPoint midpoint(const HPoint& p, const HPoint& q) {
  return HPoint(p.x() * q.w() + q.x() * p.w(), p.y() * q.w() + q.y() * p.w(), 2 * p.w() * q.w());
}

bool on_segment(const HPoint& a, const HPoint& b, const HPoint& p) {
  if (orientation(a, b, p) != Orientation::collinear) return false;
  return compare_along(a, b, a, p) >= 0 && compare_along(a, b, p, b) >= 0;
}

int compare_angle(const HPoint& origin, const HPoint& p, const HPoint& q) {
  auto [vx, vy] = diff(origin, p);
  auto [ux, uy] = diff(origin, q);
  auto half = [](const Int& x, const Int& y) { return sgn(y) < 0 || (sgn(y) == 0 && sgn(x) < 0); };
  const bool hv = half(vx, vy);
  const bool hu = half(ux, uy);
  if (hv != hu) return hv ? 1 : -1;
  Int cross = vx * uy - vy * ux;
  return -sgn(cross);
}

}  // namespace hsr

#include <algorithm>
#include <array>

#include "hsr/box_sweep.hpp"
#include "hsr/errors.hpp"
#include "hsr/scene.hpp"

namespace hsr {

namespace {

using Poly = std::vector<RPoint2>;

Rational cross2(const RPoint2& o, const RPoint2& a, const RPoint2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::array<RPoint2, 3> projected_ccw(const Scene& scene, TriangleId t) {
  std::array<RPoint2, 3> p;
  for (unsigned c = 0; c < 3; ++c) {
    HPoint h = scene.project_corner(t, c);
    p[c] = {h.rx(), h.ry()};
  }
  if (scene.is_clockwise(t)) std::swap(p[1], p[2]);
  return p;
}

// Clips a convex polygon against the left side of the directed line a -> b.
Poly clip(const Poly& poly, const RPoint2& a, const RPoint2& b) {
  Poly out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const RPoint2& p = poly[i];
    const RPoint2& q = poly[(i + 1) % poly.size()];
    const Rational sp = cross2(a, b, p), sq = cross2(a, b, q);
    if (sgn(sp) >= 0) out.push_back(p);
    if ((sgn(sp) > 0 && sgn(sq) < 0) || (sgn(sp) < 0 && sgn(sq) > 0)) {
      const Rational t = sp / (sp - sq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

Rational twice_area(const Poly& poly) {
  Rational a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const RPoint2& p = poly[i];
    const RPoint2& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

std::vector<Box> triangle_boxes(const Scene& scene) {
  std::vector<Box> boxes;
  boxes.reserve(scene.size());
  for (TriangleId t = 0; t < scene.size(); ++t) {
    Box b{1e300, -1e300, 1e300, -1e300};
    for (unsigned c = 0; c < 3; ++c) {
      HPoint h = scene.project_corner(t, c);
      const double x = h.dx(), y = h.dy();
      b = {std::min(b.xmin, x), std::max(b.xmax, x), std::min(b.ymin, y), std::max(b.ymax, y)};
    }
    boxes.push_back(b.inflated());
  }
  return boxes;
}

std::vector<Box> edge_boxes(const Scene& scene) {
  std::vector<Box> boxes;
  boxes.reserve(scene.num_edges());
  for (EdgeId e = 0; e < scene.num_edges(); ++e) {
    auto [a, b] = scene.edge_endpoints(e);
    boxes.push_back(Box{std::min(a.dx(), b.dx()), std::max(a.dx(), b.dx()), std::min(a.dy(), b.dy()),
                        std::max(a.dy(), b.dy())}
                        .inflated());
  }
  return boxes;
}

enum class EdgeContact { none, crossing, degenerate };

EdgeContact classify_edge_pair(const Scene& scene, EdgeId e1, EdgeId e2) {
  auto [a1, b1] = scene.edge_endpoints(e1);
  auto [a2, b2] = scene.edge_endpoints(e2);
  const Orientation oa = orientation(a1, b1, a2), ob = orientation(a1, b1, b2);
  if (oa == Orientation::collinear && ob == Orientation::collinear) {
    // Same supporting line: any shared point is a degeneracy.
    const bool apart = (compare_along(a1, b1, b1, a2) > 0 && compare_along(a1, b1, b1, b2) > 0) ||
                       (compare_along(a1, b1, a2, a1) > 0 && compare_along(a1, b1, b2, a1) > 0);
    return apart ? EdgeContact::none : EdgeContact::degenerate;
  }
  const Orientation oc = orientation(a2, b2, a1), od = orientation(a2, b2, b1);
  if (oa == ob || oc == od) {
    // No proper crossing; a touching endpoint still counts as degenerate.
    if ((oa == Orientation::collinear && on_segment(a1, b1, a2)) ||
        (ob == Orientation::collinear && on_segment(a1, b1, b2)) ||
        (oc == Orientation::collinear && on_segment(a2, b2, a1)) ||
        (od == Orientation::collinear && on_segment(a2, b2, b1)))
      return EdgeContact::degenerate;
    return EdgeContact::none;
  }
  if (oa == Orientation::collinear || ob == Orientation::collinear || oc == Orientation::collinear ||
      od == Orientation::collinear)
    return EdgeContact::degenerate;
  return EdgeContact::crossing;
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> find_depth_violation(const Scene& scene) {
  const auto boxes = triangle_boxes(scene);
  std::optional<std::pair<std::size_t, std::size_t>> found;
  for_each_overlapping_pair(std::span<const Box>(boxes), [&](std::size_t i, std::size_t j) {
    if (found && std::make_pair(i + 1, j + 1) > *found) return;
    const auto ti = projected_ccw(scene, static_cast<TriangleId>(i));
    const auto tj = projected_ccw(scene, static_cast<TriangleId>(j));
    Poly poly(tj.begin(), tj.end());
    for (unsigned k = 0; k < 3 && !poly.empty(); ++k) poly = clip(poly, ti[k], ti[(k + 1) % 3]);
    if (poly.size() < 3 || sgn(twice_area(poly)) <= 0) return;
    RPoint2 sample{0, 0};
    for (const auto& p : poly) {
      sample.x += p.x;
      sample.y += p.y;
    }
    sample.x /= static_cast<long>(poly.size());
    sample.y /= static_cast<long>(poly.size());
    const Rational di = scene.ray_depth(static_cast<TriangleId>(i), sample.x, sample.y);
    const Rational dj = scene.ray_depth(static_cast<TriangleId>(j), sample.x, sample.y);
    // Triangle j (higher index) must be strictly nearer wherever the two overlap.
    if (dj >= di) {
      auto cand = std::make_pair(i + 1, j + 1);
      if (!found || cand < *found) found = cand;
    }
  });
  return found;
}

void validate_depth_order(const Scene& scene) {
  if (auto v = find_depth_violation(scene)) throw DepthOrderViolation(v->first, v->second);
}

std::vector<VertexRef> all_edge_crossings(const Scene& scene) {
  const auto boxes = edge_boxes(scene);
  std::vector<VertexRef> out;
  for_each_overlapping_pair(std::span<const Box>(boxes), [&](std::size_t i, std::size_t j) {
    const auto e1 = static_cast<EdgeId>(i), e2 = static_cast<EdgeId>(j);
    if (edge_triangle(e1) == edge_triangle(e2)) return;
    if (classify_edge_pair(scene, e1, e2) == EdgeContact::crossing) out.push_back(VertexRef::crossing(e1, e2));
  });
  std::sort(out.begin(), out.end());
  return out;
}

void check_general_position(const Scene& scene) {
  const auto boxes = edge_boxes(scene);
  std::vector<VertexRef> crossings;
  for_each_overlapping_pair(std::span<const Box>(boxes), [&](std::size_t i, std::size_t j) {
    const auto e1 = static_cast<EdgeId>(i), e2 = static_cast<EdgeId>(j);
    if (edge_triangle(e1) == edge_triangle(e2)) return;
    switch (classify_edge_pair(scene, e1, e2)) {
      case EdgeContact::degenerate:
        throw DegeneracyDetected("edges " + std::to_string(e1) + " and " + std::to_string(e2) +
                                 " touch or overlap");
      case EdgeContact::crossing:
        crossings.push_back(VertexRef::crossing(e1, e2));
        break;
      case EdgeContact::none:
        break;
    }
  });
  std::sort(crossings.begin(), crossings.end(), [&](VertexRef a, VertexRef b) {
    return compare_xy(scene.resolve_unchecked(a), scene.resolve_unchecked(b)) < 0;
  });
  for (std::size_t i = 1; i < crossings.size(); ++i) {
    if (scene.resolve_unchecked(crossings[i - 1]) == scene.resolve_unchecked(crossings[i]))
      throw DegeneracyDetected("three edges meet at " + crossings[i].to_string());
  }
}

PaddedScene pad_to_power_of_two(const Scene& scene) {
  const std::size_t n = scene.size();
  const std::size_t target = next_power_of_two(n);
  if (target == n) return {scene, 0};
  const std::size_t p = target - n;
  const RTriangle3 far = scene.triangle(0);
  const RPoint3 eye = scene.viewpoint();
  const RPoint3 c{(far[0].x + far[1].x + far[2].x) / 3, (far[0].y + far[1].y + far[2].y) / 3,
                  (far[0].z + far[1].z + far[2].z) / 3};
  const auto originals = scene.triangles();

  for (unsigned attempt = 0; attempt < 16; ++attempt) {
    std::vector<RTriangle3> tris;
    tris.reserve(target);
    for (std::size_t j = 0; j < p; ++j) {
      // Nested sizes inside the farthest triangle; index 0 is pushed back the most.
      const Rational lambda = ratio(static_cast<long>(j + 1), static_cast<long>(2 * (p + 1))) +
                              ratio(static_cast<long>(attempt), static_cast<long>(97 * (p + 1)));
      const Rational mu = 1 + ratio(static_cast<long>(p - j), static_cast<long>(p + 1));
      RTriangle3 t;
      for (unsigned k = 0; k < 3; ++k) {
        const RPoint3 s{c.x + lambda * (far[k].x - c.x), c.y + lambda * (far[k].y - c.y),
                        c.z + lambda * (far[k].z - c.z)};
        t[k] = {eye.x + mu * (s.x - eye.x), eye.y + mu * (s.y - eye.y), eye.z + mu * (s.z - eye.z)};
      }
      tris.push_back(t);
    }
    tris.insert(tris.end(), originals.begin(), originals.end());
    Scene padded = Scene::from_rational(eye, tris, scene.frame(), p);
    try {
      check_general_position(padded);
    } catch (const DegeneracyDetected&) {
      continue;
    }
    return {std::move(padded), p};
  }
  throw DegeneracyDetected("could not place padding triangles in general position");
}

}  // namespace hsr

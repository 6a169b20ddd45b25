#include "hsr/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

#include "hsr/errors.hpp"

namespace hsr {

namespace {

// Strictly inside triangle s (the point is known not to lie on its boundary).
bool strictly_inside(const Scene& scene, TriangleId s, const HPoint& p) {
  const HPoint a = scene.project_corner(s, 0), b = scene.project_corner(s, 1), c = scene.project_corner(s, 2);
  const Orientation o1 = orientation(a, b, p), o2 = orientation(b, c, p), o3 = orientation(c, a, p);
  return o1 != Orientation::collinear && o1 == o2 && o2 == o3;
}

struct Piece {
  VertexRef from, to;
  EdgeId edge;
};

// Twice the signed area of a cycle; positive when counterclockwise.
Rational twice_area(const std::vector<VertexRef>& cycle, const Scene& scene) {
  Rational sum = 0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const HPoint p = scene.resolve_unchecked(cycle[i]);
    const HPoint q = scene.resolve_unchecked(cycle[(i + 1) % cycle.size()]);
    sum += ratio(p.x() * q.y() - q.x() * p.y(), p.w() * q.w());
  }
  return sum;
}

Region assemble(std::vector<Piece> pieces, const Scene& scene) {
  std::unordered_map<std::uint64_t, std::size_t> out_of;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!out_of.emplace(pieces[i].from.raw(), i).second)
      throw InvariantError("visible boundary pinches at " + pieces[i].from.to_string());
  }
  std::vector<bool> used(pieces.size(), false);
  Region r;
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    if (used[s]) continue;
    std::vector<std::size_t> run;
    for (std::size_t i = s; !used[i];) {
      used[i] = true;
      run.push_back(i);
      auto it = out_of.find(pieces[i].to.raw());
      if (it == out_of.end()) throw InvariantError("visible boundary is open at " + pieces[i].to.to_string());
      i = it->second;
    }
    // A vertex stays when the boundary changes edge there.
    Cycle c;
    for (std::size_t j = 0; j < run.size(); ++j) {
      const Piece& in = pieces[run[j]];
      const Piece& out = pieces[run[(j + 1) % run.size()]];
      if (in.edge != out.edge) c.vertices.push_back(in.to);
    }
    if (c.vertices.size() < 3) throw InvariantError("visible cycle with fewer than three corners");
    c.hole = sgn(twice_area(c.vertices, scene)) > 0;
    r.cycles.push_back(std::move(c));
  }
  normalize(r);
  return r;
}

}  // namespace

std::size_t count_edge_crossings(const Scene& scene) { return all_edge_crossings(scene).size(); }

VisibilityMap trivial_viewshed(const Scene& scene) {
  const std::size_t n = scene.size();
  std::vector<std::vector<VertexRef>> on_edge(scene.num_edges());
  for (EdgeId e = 0; e < scene.num_edges(); ++e) {
    const TriangleId t = edge_triangle(e);
    const unsigned c = e % 3;
    on_edge[e] = {VertexRef::corner(t, c), VertexRef::corner(t, (c + 1) % 3)};
  }
  for (VertexRef x : all_edge_crossings(scene)) {
    on_edge[x.edge_a()].push_back(x);
    on_edge[x.edge_b()].push_back(x);
  }

  std::vector<std::vector<Piece>> boundary(n);
  constexpr TriangleId none = ~TriangleId{0};
  for (EdgeId e = 0; e < scene.num_edges(); ++e) {
    const TriangleId t = edge_triangle(e);
    auto [s, d] = scene.edge_endpoints(e);
    auto& pts = on_edge[e];
    std::sort(pts.begin(), pts.end(), [&](VertexRef p, VertexRef q) {
      return compare_along(s, d, scene.resolve_unchecked(p), scene.resolve_unchecked(q)) > 0;
    });
    // Corners 0, 1, 2 counterclockwise put the interior left of every edge.
    const bool interior_right = scene.is_clockwise(t);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const HPoint m = midpoint(scene.resolve_unchecked(pts[i]), scene.resolve_unchecked(pts[i + 1]));
      const Rational mx = m.rx(), my = m.ry();
      TriangleId front = none;
      Rational front_depth;
      for (TriangleId u = 0; u < n; ++u) {
        if (u == t || !strictly_inside(scene, u, m)) continue;
        Rational dep = scene.ray_depth(u, mx, my);
        if (front == none || dep < front_depth) {
          front = u;
          front_depth = std::move(dep);
        }
      }
      const bool t_wins = front == none || scene.ray_depth(t, mx, my) < front_depth;
      const TriangleId right = interior_right && t_wins ? t : front;
      const TriangleId left = !interior_right && t_wins ? t : front;
      if (right == left) continue;
      if (right != none) boundary[right].push_back({pts[i], pts[i + 1], e});
      if (left != none) boundary[left].push_back({pts[i + 1], pts[i], e});
    }
  }

  VisibilityMap map;
  map.padding = scene.padding();
  for (TriangleId t = static_cast<TriangleId>(scene.padding()); t < n; ++t)
    map.portions.push_back(assemble(std::move(boundary[t]), scene));
  return map;
}

Region naive_union(const Scene& scene, std::span<const TriangleId> triangles) {
  Region r;
  for (TriangleId t : triangles) {
    const Region tri = Region::triangle(scene, t);
    const auto x = boundary_crossings(r, tri, scene, CrossingMode::strict);
    r = region_union(r, tri, x, scene);
  }
  normalize(r);
  return r;
}

Region naive_union(const Scene& scene, TriangleId first, std::size_t count) {
  std::vector<TriangleId> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = static_cast<TriangleId>(first + i);
  return naive_union(scene, ids);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

constexpr std::int64_t kUnit = 1000000;  // plane coordinates are multiples of 1e-6

// Plane point (x, y) / kUnit lifted to depth z along the ray from the origin.
RPoint3 lift(std::int64_t x, std::int64_t y, const Rational& z) {
  const Rational px = ratio(Int(static_cast<long>(x)), Int(kUnit)) * z;
  const Rational py = ratio(Int(static_cast<long>(y)), Int(kUnit)) * z;
  return {px, py, z};
}

Rational plane_depth(std::size_t n, std::size_t t) {
  return 1 + ratio(Int(static_cast<long>(n - t)), Int(1024));
}

std::int64_t twice_area(const std::array<std::int64_t, 6>& c) {
  return (c[2] - c[0]) * (c[5] - c[1]) - (c[4] - c[0]) * (c[3] - c[1]);
}

GeneratedScene make_scene(const std::vector<std::array<std::int64_t, 6>>& plane) {
  GeneratedScene g;
  g.viewpoint = {0, 0, 0};
  const std::size_t n = plane.size();
  for (std::size_t t = 0; t < n; ++t) {
    const Rational z = plane_depth(n, t);
    g.triangles.push_back({lift(plane[t][0], plane[t][1], z), lift(plane[t][2], plane[t][3], z),
                           lift(plane[t][4], plane[t][5], z)});
  }
  return g;
}

bool in_general_position(const GeneratedScene& g) {
  try {
    check_general_position(g.scene());
    return true;
  } catch (const DegeneracyDetected&) {
    return false;
  }
}

constexpr int kMaxRejections = 10000;

}  // namespace

GeneratedScene gen_random(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UnsupportedSize("gen_random needs n >= 1");
  std::mt19937_64 rng(seed);
  // Triangle extent shrinks with n so the expected overlap per triangle stays fixed.
  const auto half = static_cast<std::int64_t>(std::min(0.5, 1.2 / std::sqrt(static_cast<double>(n))) * kUnit);
  std::uniform_int_distribution<std::int64_t> center(0, kUnit), offset(-half, half);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<std::array<std::int64_t, 6>> plane(n);
    for (auto& c : plane) {
      do {
        const std::int64_t cx = center(rng), cy = center(rng);
        for (int i = 0; i < 3; ++i) {
          c[2 * i] = cx + offset(rng);
          c[2 * i + 1] = cy + offset(rng);
        }
      } while (std::llabs(twice_area(c)) < half * half / 4);
    }
    GeneratedScene g = make_scene(plane);
    if (in_general_position(g)) return g;
  }
  throw DegeneracyDetected("gen_random: no scene in general position after 10000 draws");
}

GeneratedScene gen_worst_case(std::size_t n) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw UnsupportedSize("gen_worst_case needs a power of two >= 8, got " + std::to_string(n));
  // Clusters of eight thin sticks, one per grid cell. Stick k of a cluster has
  // direction pi * rev(k) / 8 (rev: 3-bit reversal) and is shifted sideways
  // by a few percent of the cell, so all 28 pairs cross at distinct points.
  const std::size_t clusters = n / 8;
  const auto g = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(clusters))));
  const double cell = static_cast<double>(kUnit / g);
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::int64_t> jitter(-3, 3);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<std::array<std::int64_t, 6>> plane(n);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t cl = t / 8, k = t % 8;
      const std::size_t rev = ((k & 1) << 2) | (k & 2) | ((k >> 2) & 1);
      const double theta = std::numbers::pi * (static_cast<double>(rev) + 0.13) / 8;
      const double dx = std::cos(theta), dy = std::sin(theta);
      const double offset = (static_cast<double>(k) - 3.5) * 0.015 * cell;
      const double px = (static_cast<double>(cl % g) + 0.5) * cell - dy * offset;
      const double py = (static_cast<double>(cl / g) + 0.5) * cell + dx * offset;
      const double half = 0.4 * cell, width = 0.02 * cell;
      const double pts[6] = {px - half * dx,
                             py - half * dy,
                             px + half * dx - width * dy,
                             py + half * dy + width * dx,
                             px + half * dx + width * dy,
                             py + half * dy - width * dx};
      for (int j = 0; j < 6; ++j) plane[t][j] = std::llround(pts[j]) + (attempt ? jitter(rng) : 0);
    }
    GeneratedScene gs = make_scene(plane);
    if (in_general_position(gs)) return gs;
  }
  throw DegeneracyDetected("gen_worst_case: no scene in general position after 10000 draws");
}

GeneratedScene gen_disjoint(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UnsupportedSize("gen_disjoint needs n >= 1");
  std::mt19937_64 rng(seed);
  const auto g = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::int64_t cell = kUnit / g;
  std::uniform_int_distribution<std::int64_t> inner(cell / 10, cell - cell / 10);
  std::vector<std::array<std::int64_t, 6>> plane(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::int64_t x0 = static_cast<std::int64_t>(t) % g * cell, y0 = static_cast<std::int64_t>(t) / g * cell;
    auto& c = plane[t];
    do {
      for (int i = 0; i < 3; ++i) {
        c[2 * i] = x0 + inner(rng);
        c[2 * i + 1] = y0 + inner(rng);
      }
    } while (std::llabs(twice_area(c)) < cell * cell / 8);
  }
  return make_scene(plane);
}

}  // namespace hsr

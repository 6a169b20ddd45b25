#include "hsr/overlay.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "hsr/errors.hpp"

namespace hsr {

std::size_t Region::complexity() const {
  std::size_t n = 0;
  for (const auto& c : cycles) n += c.vertices.size();
  return n;
}

Region Region::triangle(const Scene& scene, TriangleId t) {
  Cycle c;
  for (unsigned i = 0; i < 3; ++i) c.vertices.push_back(VertexRef::corner(t, scene.clockwise_slot(t, i).from));
  Region r;
  r.cycles.push_back(std::move(c));
  return r;
}

void normalize(Region& region) {
  for (auto& c : region.cycles) {
    auto it = std::min_element(c.vertices.begin(), c.vertices.end());
    std::rotate(c.vertices.begin(), it, c.vertices.end());
  }
  std::sort(region.cycles.begin(), region.cycles.end(),
            [](const Cycle& a, const Cycle& b) { return (a <=> b) < 0; });
}

namespace {

EdgeId edge_between(VertexRef a, VertexRef b) {
  auto e = common_edge(a, b);
  if (!e) throw InvariantError("consecutive vertices " + a.to_string() + " and " + b.to_string() +
                               " share no edge");
  return *e;
}

template <class F>
void for_each_fragment(const Cycle& c, F&& f) {
  const auto& v = c.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const VertexRef a = v[i], b = v[(i + 1) % v.size()];
    f(Fragment{a, b, edge_between(a, b)});
  }
}

}  // namespace

std::vector<Fragment> fragments(const Region& region) {
  std::vector<Fragment> out;
  out.reserve(region.complexity());
  for (const auto& c : region.cycles) for_each_fragment(c, [&](const Fragment& f) { out.push_back(f); });
  return out;
}

// ---------------------------------------------------------------------------
// Crossing detection

namespace {

void test_pair(const Fragment& f, const Fragment& g, const Scene& scene, CrossingMode mode,
               std::vector<VertexRef>& out) {
  const bool strict = mode == CrossingMode::strict;
  if (strict && edge_triangle(f.edge) == edge_triangle(g.edge))
    throw DegeneracyDetected("both regions use triangle " + std::to_string(edge_triangle(f.edge) + 1));
  if (!strict && edge_triangle(f.edge) == edge_triangle(g.edge)) return;  // meet at a corner at most
  const HPoint p = scene.resolve_unchecked(f.from), q = scene.resolve_unchecked(f.to);
  const HPoint r = scene.resolve_unchecked(g.from), s = scene.resolve_unchecked(g.to);
  const Orientation o1 = orientation(p, q, r), o2 = orientation(p, q, s);
  if (o1 == o2 && o1 != Orientation::collinear) return;
  const Orientation o3 = orientation(r, s, p), o4 = orientation(r, s, q);
  if (o3 == o4 && o3 != Orientation::collinear) return;
  const bool proper = o1 != Orientation::collinear && o2 != Orientation::collinear &&
                      o3 != Orientation::collinear && o4 != Orientation::collinear;
  if (proper) {
    out.push_back(VertexRef::crossing(f.edge, g.edge));
    return;
  }
  if (!strict) return;
  const bool touch = on_segment(p, q, r) || on_segment(p, q, s) || on_segment(r, s, p) || on_segment(r, s, q);
  if (touch)
    throw DegeneracyDetected("boundaries touch between " + f.from.to_string() + "-" + f.to.to_string() +
                             " and " + g.from.to_string() + "-" + g.to.to_string());
}

constexpr std::size_t kAllPairsLimit = 64;

}  // namespace

std::vector<VertexRef> boundary_crossings(const Region& a, const Region& b, const Scene& scene,
                                          CrossingMode mode) {
  const auto fa = fragments(a), fb = fragments(b);
  std::vector<VertexRef> out;
  if (fa.size() + fb.size() <= kAllPairsLimit) {
    for (const auto& f : fa)
      for (const auto& g : fb) test_pair(f, g, scene, mode, out);
  } else {
    // Sweep over x-extents; only fragments whose extents overlap are tested exactly.
    std::vector<Fragment> all(fa);
    all.insert(all.end(), fb.begin(), fb.end());
    const std::size_t split = fa.size();
    std::vector<bool> from_is_left(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      from_is_left[i] =
          compare_x(scene.resolve_unchecked(all[i].from), scene.resolve_unchecked(all[i].to)) <= 0;
    auto left = [&](std::size_t i) { return scene.resolve_unchecked(from_is_left[i] ? all[i].from : all[i].to); };
    auto right = [&](std::size_t i) { return scene.resolve_unchecked(from_is_left[i] ? all[i].to : all[i].from); };
    std::vector<std::uint32_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t i, std::uint32_t j) { return compare_x(left(i), left(j)) < 0; });
    std::vector<std::uint32_t> active;
    for (std::uint32_t i : order) {
      {
        // Released before the pair tests so the sweep needs no more live
        // points than the all-pairs loop.
        const HPoint lx = left(i);
        std::erase_if(active, [&](std::uint32_t k) { return compare_x(right(k), lx) < 0; });
      }
      for (std::uint32_t k : active) {
        if ((k < split) == (i < split)) continue;
        if (k < split)
          test_pair(all[k], all[i], scene, mode, out);
        else
          test_pair(all[i], all[k], scene, mode, out);
      }
      active.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Point location and area

Location point_in_region(const Region& region, const HPoint& point, const Scene& scene) {
  bool inside = false;
  for (const auto& c : region.cycles) {
    const auto& v = c.vertices;
    if (v.empty()) continue;
    HPoint a = scene.resolve_unchecked(v.back());
    for (std::size_t i = 0; i < v.size(); ++i) {
      HPoint b = scene.resolve_unchecked(v[i]);
      if (on_segment(a, b, point)) return Location::on_boundary;
      const bool a_above = compare_y(a, point) > 0, b_above = compare_y(b, point) > 0;
      if (a_above != b_above) {
        const Orientation o = orientation(a, b, point);
        if ((b_above && o == Orientation::left) || (!b_above && o == Orientation::right)) inside = !inside;
      }
      a = std::move(b);
    }
  }
  return inside ? Location::inside : Location::outside;
}

Rational region_area(const Region& region, const Scene& scene) {
  Rational twice = 0;
  for (const auto& c : region.cycles) {
    const auto& v = c.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const HPoint p = scene.resolve_unchecked(v[i]), q = scene.resolve_unchecked(v[(i + 1) % v.size()]);
      twice += p.rx() * q.ry() - q.rx() * p.ry();
    }
  }
  // Outer cycles are clockwise, so their signed area is negative.
  return -twice / 2;
}

bool cycle_is_hole(const std::vector<VertexRef>& cycle, const Scene& scene) {
  // The turn at the lexicographically lowest vertex (a hull vertex) gives the orientation.
  std::size_t lo = 0;
  {
    HPoint best = scene.resolve_unchecked(cycle[0]);
    for (std::size_t k = 1; k < cycle.size(); ++k) {
      HPoint h = scene.resolve_unchecked(cycle[k]);
      if (compare_xy(h, best) < 0) {
        best = std::move(h);
        lo = k;
      }
    }
  }
  const std::size_t n = cycle.size();
  const Orientation o = orientation(scene.resolve_unchecked(cycle[(lo + n - 1) % n]),
                                    scene.resolve_unchecked(cycle[lo]),
                                    scene.resolve_unchecked(cycle[(lo + 1) % n]));
  if (o == Orientation::collinear) throw DegeneracyDetected("degenerate boundary cycle");
  return o == Orientation::left;
}

std::string to_string(const Region& region) {
  std::ostringstream os;
  for (const auto& c : region.cycles) {
    os << (c.hole ? "hole:" : "outer:");
    for (const auto& v : c.vertices) os << ' ' << v.to_string();
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Boolean operations

namespace {

enum class Op { unite, intersect, subtract };

enum class Status : std::uint8_t { unknown, inside, outside, shared_same, shared_opposite };

struct Piece {
  VertexRef u, v;
  EdgeId edge;
};

struct VertexUse {
  std::uint32_t in = 0, out = 0;
  std::uint32_t count = 0;
};

// Sorted points of one edge, with a lookup from ref to position.
struct EdgePoints {
  std::vector<VertexRef> along;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> by_ref;

  std::uint32_t index(VertexRef v) const {
    auto it = std::lower_bound(by_ref.begin(), by_ref.end(), std::make_pair(v.raw(), std::uint32_t{0}));
    return it->second;
  }
};

class Overlay {
 public:
  Overlay(const Region& a, const Region& b, std::span<const VertexRef> crossings, const Scene& scene)
      : scene_(scene), regions_{&a, &b} {
    collect_points(crossings);
    for (int r = 0; r < 2; ++r) split(r);
    match_shared();
    for (int r = 0; r < 2; ++r) index_vertices(r);
    for (int r = 0; r < 2; ++r) classify(r);
  }

  Region run(Op op) const {
    std::vector<Piece> chosen;
    for (int r = 0; r < 2; ++r) {
      for (const auto& cyc : cycles_[r]) {
        for (std::uint32_t i : cyc) {
          const Piece& p = pieces_[i];
          const Status s = status_[i];
          if (s == Status::shared_same || s == Status::shared_opposite) {
            // Shared pieces are taken from A only, so each is emitted once.
            if (r == 1) continue;
            if (op == Op::subtract ? s == Status::shared_opposite : s == Status::shared_same) chosen.push_back(p);
            continue;
          }
          const bool inside = s == Status::inside;
          switch (op) {
            case Op::unite:
              if (!inside) chosen.push_back(p);
              break;
            case Op::intersect:
              if (inside) chosen.push_back(p);
              break;
            case Op::subtract:
              if (r == 0 && !inside) chosen.push_back(p);
              if (r == 1 && inside) chosen.push_back(Piece{p.v, p.u, p.edge});
              break;
          }
        }
      }
    }
    return stitch(chosen);
  }

 private:
  void collect_points(std::span<const VertexRef> crossings) {
    std::unordered_map<EdgeId, std::vector<VertexRef>> raw_points;
    for (int r = 0; r < 2; ++r) {
      for (const auto& c : regions_[r]->cycles) {
        for_each_fragment(c, [&](const Fragment& f) {
          auto& pts = raw_points[f.edge];
          pts.push_back(f.from);
          pts.push_back(f.to);
        });
      }
    }
    for (VertexRef x : crossings) {
      for (EdgeId e : {x.edge_a(), x.edge_b()}) {
        auto it = raw_points.find(e);
        if (it != raw_points.end()) it->second.push_back(x);
      }
    }
    for (auto& [e, pts] : raw_points) {
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      auto [s, t] = scene_.edge_endpoints(e);
      std::sort(pts.begin(), pts.end(), [&](VertexRef p, VertexRef q) {
        return compare_along(s, t, scene_.resolve_unchecked(p), scene_.resolve_unchecked(q)) > 0;
      });
      EdgePoints ep;
      ep.by_ref.reserve(pts.size());
      for (std::uint32_t i = 0; i < pts.size(); ++i) ep.by_ref.emplace_back(pts[i].raw(), i);
      std::sort(ep.by_ref.begin(), ep.by_ref.end());
      ep.along = std::move(pts);
      points_.emplace(e, std::move(ep));
    }
  }

  void split(int r) {
    for (const auto& c : regions_[r]->cycles) {
      std::vector<std::uint32_t> cyc;
      for_each_fragment(c, [&](const Fragment& f) {
        const EdgePoints& ep = points_.at(f.edge);
        const std::uint32_t i = ep.index(f.from), j = ep.index(f.to);
        if (i == j) throw DegeneracyDetected("zero-length boundary fragment at " + f.from.to_string());
        const int step = i < j ? 1 : -1;
        for (std::uint32_t k = i; k != j; k += step) {
          const std::uint32_t next = k + step;
          const std::uint32_t lo = std::min(k, next);
          cyc.push_back(static_cast<std::uint32_t>(pieces_.size()));
          pieces_.push_back(Piece{ep.along[k], ep.along[next], f.edge});
          slot_.push_back(lo);
        }
      });
      cycles_[r].push_back(std::move(cyc));
    }
    status_.resize(pieces_.size(), Status::unknown);
  }

  static std::uint64_t slot_key(EdgeId e, std::uint32_t lo) { return (static_cast<std::uint64_t>(e) << 32) | lo; }

  void match_shared() {
    std::unordered_map<std::uint64_t, std::uint32_t> a_slots;
    for (const auto& cyc : cycles_[0])
      for (std::uint32_t i : cyc) a_slots.emplace(slot_key(pieces_[i].edge, slot_[i]), i);
    for (const auto& cyc : cycles_[1]) {
      for (std::uint32_t i : cyc) {
        auto it = a_slots.find(slot_key(pieces_[i].edge, slot_[i]));
        if (it == a_slots.end()) continue;
        const Status s = pieces_[it->second].u == pieces_[i].u ? Status::shared_same : Status::shared_opposite;
        status_[it->second] = s;
        status_[i] = s;
      }
    }
  }

  void index_vertices(int r) {
    for (const auto& cyc : cycles_[r]) {
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        const std::uint32_t in = cyc[(k + cyc.size() - 1) % cyc.size()], out = cyc[k];
        VertexUse& use = uses_[r][pieces_[out].u.raw()];
        use.in = in;
        use.out = out;
        ++use.count;
      }
    }
  }

  static bool is_shared(Status s) { return s == Status::shared_same || s == Status::shared_opposite; }

  // Status of piece i of region r, which starts at a vertex of the other boundary.
  Status status_at_contact(int r, std::uint32_t i) const {
    const Piece& p = pieces_[i];
    const auto& other = uses_[1 - r];
    auto it = other.find(p.u.raw());
    if (it != other.end() && it->second.count == 1) {
      const Piece& in = pieces_[it->second.in];
      const Piece& out = pieces_[it->second.out];
      // The other interior is the wedge swept counterclockwise from the way
      // back along `in` up to `out`; p is not shared, so it leaves strictly
      // inside or outside that wedge.
      const HPoint origin = scene_.resolve_unchecked(p.u);
      return ccw_before(origin, scene_.resolve_unchecked(in.u), scene_.resolve_unchecked(p.v),
                        scene_.resolve_unchecked(out.v))
                 ? Status::inside
                 : Status::outside;
    }
    return status_by_midpoint(r, i);
  }

  Status status_by_midpoint(int r, std::uint32_t i) const {
    const Piece& p = pieces_[i];
    const HPoint mid = midpoint(scene_.resolve_unchecked(p.u), scene_.resolve_unchecked(p.v));
    switch (point_in_region(*regions_[1 - r], mid, scene_)) {
      case Location::inside:
        return Status::inside;
      case Location::outside:
        return Status::outside;
      case Location::on_boundary:
        break;
    }
    throw DegeneracyDetected("boundary piece " + p.u.to_string() + "-" + p.v.to_string() +
                             " runs along the other region without sharing an edge");
  }

  void classify(int r) {
    const auto& other = uses_[1 - r];
    for (const auto& cyc : cycles_[r]) {
      const std::size_t m = cyc.size();
      auto is_break = [&](std::size_t k) {
        const std::uint32_t i = cyc[k], prev = cyc[(k + m - 1) % m];
        return is_shared(status_[i]) || is_shared(status_[prev]) || other.count(pieces_[i].u.raw()) != 0;
      };
      std::size_t first = m;
      for (std::size_t k = 0; k < m; ++k)
        if (is_break(k)) {
          first = k;
          break;
        }
      if (first == m) {
        const Status s = status_by_midpoint(r, cyc[0]);
        for (std::uint32_t i : cyc) status_[i] = s;
        continue;
      }
      Status current = Status::unknown;
      for (std::size_t step = 0; step < m; ++step) {
        const std::size_t k = (first + step) % m;
        const std::uint32_t i = cyc[k];
        if (is_shared(status_[i])) continue;
        if (is_break(k)) current = status_at_contact(r, i);
        status_[i] = current;
      }
    }
  }

  // True when, turning counterclockwise from direction origin->ref, p comes before q.
  bool ccw_before(const HPoint& origin, const HPoint& ref, const HPoint& p, const HPoint& q) const {
    auto rank = [&](const HPoint& x) {
      const Orientation o = orientation(origin, ref, x);
      if (o == Orientation::left) return 0;
      if (o == Orientation::right) return 2;
      return compare_along(origin, ref, origin, x) < 0 ? 1 : 3;
    };
    const int rp = rank(p), rq = rank(q);
    if (rp != rq) return rp < rq;
    return orientation(origin, p, q) == Orientation::left;
  }

  Region stitch(const std::vector<Piece>& chosen) const {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> outgoing;
    for (std::uint32_t i = 0; i < chosen.size(); ++i) outgoing[chosen[i].u.raw()].push_back(i);
    std::vector<bool> used(chosen.size(), false);
    Region result;
    for (std::uint32_t start = 0; start < chosen.size(); ++start) {
      if (used[start]) continue;
      std::vector<VertexRef> verts;
      std::vector<EdgeId> edges;
      std::uint32_t cur = start;
      while (true) {
        if (used[cur]) throw InvariantError("overlay stitching reused a boundary piece");
        used[cur] = true;
        verts.push_back(chosen[cur].u);
        edges.push_back(chosen[cur].edge);
        const auto it = outgoing.find(chosen[cur].v.raw());
        if (it == outgoing.end()) throw InvariantError("overlay boundary is not closed at " + chosen[cur].v.to_string());
        std::uint32_t next = it->second.front();
        if (it->second.size() > 1) {
          const HPoint origin = scene_.resolve_unchecked(chosen[cur].v);
          const HPoint back = scene_.resolve_unchecked(chosen[cur].u);
          for (std::size_t k = 1; k < it->second.size(); ++k) {
            const std::uint32_t cand = it->second[k];
            if (ccw_before(origin, back, scene_.resolve_unchecked(chosen[cand].v),
                           scene_.resolve_unchecked(chosen[next].v)))
              next = cand;
          }
        }
        if (next == start) break;
        cur = next;
      }
      if (auto c = simplify(verts, edges)) result.cycles.push_back(std::move(*c));
    }
    normalize(result);
    return result;
  }

  std::optional<Cycle> simplify(const std::vector<VertexRef>& verts, const std::vector<EdgeId>& edges) const {
    const std::size_t m = verts.size();
    Cycle c;
    for (std::size_t k = 0; k < m; ++k)
      if (edges[(k + m - 1) % m] != edges[k]) c.vertices.push_back(verts[k]);
    if (c.vertices.size() < 3) throw DegeneracyDetected("overlay produced a zero-area cycle");
    c.hole = cycle_is_hole(c.vertices, scene_);
    return c;
  }

  const Scene& scene_;
  const Region* regions_[2];
  std::unordered_map<EdgeId, EdgePoints> points_;
  std::vector<Piece> pieces_;
  std::vector<std::uint32_t> slot_;
  std::vector<Status> status_;
  std::vector<std::vector<std::uint32_t>> cycles_[2];
  std::unordered_map<std::uint64_t, VertexUse> uses_[2];
};

Region boolean(Op op, const Region& a, const Region& b, std::span<const VertexRef> crossings, const Scene& scene) {
  // Cheap exits keep the common empty cases allocation-free.
  if (b.empty()) {
    if (op == Op::intersect) return {};
    Region r = a;
    normalize(r);
    return r;
  }
  if (a.empty()) {
    if (op != Op::unite) return {};
    Region r = b;
    normalize(r);
    return r;
  }
  return Overlay(a, b, crossings, scene).run(op);
}

}  // namespace

std::pair<Region, Region> region_split(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                                       const Scene& scene) {
  if (a.empty() || b.empty())
    return {boolean(Op::intersect, a, b, crossings, scene), boolean(Op::subtract, a, b, crossings, scene)};
  const Overlay o(a, b, crossings, scene);
  return {o.run(Op::intersect), o.run(Op::subtract)};
}

Region region_union(const Region& a, const Region& b, std::span<const VertexRef> crossings, const Scene& scene) {
  return boolean(Op::unite, a, b, crossings, scene);
}

Region region_intersection(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                           const Scene& scene) {
  return boolean(Op::intersect, a, b, crossings, scene);
}

Region region_difference(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                         const Scene& scene) {
  return boolean(Op::subtract, a, b, crossings, scene);
}

}  // namespace hsr

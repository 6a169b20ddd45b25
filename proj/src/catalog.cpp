#include "hsr/catalog.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "hsr/errors.hpp"

namespace hsr {

struct CatalogBuilder {
  // refs in final order, cross pointers as plain positions, block sizes.
  static VertexCatalog build(const std::vector<VertexRef>& refs, const std::vector<std::uint64_t>& cross,
                             const std::vector<std::size_t>& counts, unsigned level, std::size_t num_edges) {
    VertexCatalog c;
    c.level_ = level;
    c.edge_bits_ = bits_for(num_edges == 0 ? 0 : num_edges - 1);
    c.refs_ = PackedIntVector(refs.size(), 2 * c.edge_bits_ + 1);
    for (std::size_t i = 0; i < refs.size(); ++i) c.refs_.set(i, c.pack(refs[i]));
    const unsigned pos_bits = bits_for(refs.empty() ? 0 : refs.size() - 1);
    c.cross_ = PackedIntVector::from_range(cross.begin(), cross.end(), pos_bits);
    c.prefix_ = PackedIntVector(counts.size() + 1, bits_for(refs.size()));
    std::size_t run = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      run += counts[k];
      c.prefix_.set(k + 1, run);
    }
    return c;
  }
};

std::uint64_t VertexCatalog::pack(VertexRef v) const {
  if (v.is_corner()) return v.raw();
  return (((static_cast<std::uint64_t>(v.edge_a()) << edge_bits_) | v.edge_b()) << 1) | 1u;
}

VertexRef VertexCatalog::unpack(std::uint64_t packed) const {
  if ((packed & 1u) == 0) return VertexRef::from_raw(packed);
  const std::uint64_t body = packed >> 1;
  return VertexRef::crossing(static_cast<EdgeId>(body >> edge_bits_),
                             static_cast<EdgeId>(body & ((1ull << edge_bits_) - 1)));
}

namespace {

// Pairs the two occurrences of each crossing; corners point at themselves.
std::vector<std::uint64_t> pair_crossings(const std::vector<VertexRef>& refs) {
  std::vector<std::uint64_t> cross(refs.size());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> occ;
  for (std::size_t q = 0; q < refs.size(); ++q) {
    cross[q] = q;
    if (refs[q].is_crossing()) occ.emplace_back(refs[q].raw(), q);
  }
  std::sort(occ.begin(), occ.end());
  for (std::size_t i = 0; i < occ.size(); i += 2) {
    if (i + 1 >= occ.size() || occ[i].first != occ[i + 1].first)
      throw InvariantError("crossing " + VertexRef::from_raw(occ[i].first).to_string() + " occurs only once");
    if (i + 2 < occ.size() && occ[i + 2].first == occ[i].first)
      throw DuplicateVertex(VertexRef::from_raw(occ[i].first).to_string());
    cross[occ[i].second] = occ[i + 1].second;
    cross[occ[i + 1].second] = occ[i].second;
  }
  return cross;
}

}  // namespace

VertexCatalog VertexCatalog::leaf_level(const Scene& scene) {
  std::vector<VertexRef> refs;
  refs.reserve(3 * scene.size());
  for (TriangleId t = 0; t < scene.size(); ++t)
    for (unsigned i = 0; i < 3; ++i) refs.push_back(VertexRef::corner(t, scene.clockwise_slot(t, i).from));
  std::vector<std::size_t> counts(scene.size(), 3);
  return CatalogBuilder::build(refs, pair_crossings(refs), counts, 1, scene.num_edges());
}

VertexCatalog VertexCatalog::from_blocks(const std::vector<std::vector<VertexRef>>& blocks, unsigned level,
                                         std::size_t num_edges) {
  std::vector<VertexRef> refs;
  std::vector<std::size_t> counts;
  for (const auto& b : blocks) {
    refs.insert(refs.end(), b.begin(), b.end());
    counts.push_back(b.size());
  }
  return CatalogBuilder::build(refs, pair_crossings(refs), counts, level, num_edges);
}

std::size_t VertexCatalog::abs_position(TriangleId k, std::size_t r) const {
  if (k >= num_triangles() || r >= count(k)) throw std::out_of_range("catalog position out of range");
  return block_begin(k) + r;
}

std::pair<TriangleId, std::size_t> VertexCatalog::rel_position(std::size_t q) const {
  if (q >= size()) throw std::out_of_range("catalog position out of range");
  // Largest k with prefix[k] <= q.
  std::size_t lo = 0, hi = num_triangles();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (prefix_[mid] <= q)
      lo = mid;
    else
      hi = mid;
  }
  return {static_cast<TriangleId>(lo), q - prefix_[lo]};
}

std::optional<std::size_t> VertexCatalog::find(TriangleId k, VertexRef v) const {
  const std::uint64_t p = pack(v);
  for (std::size_t q = block_begin(k); q < block_end(k); ++q)
    if (refs_[q] == p) return q;
  return std::nullopt;
}

std::string VertexCatalog::dump() const {
  std::ostringstream os;
  for (TriangleId k = 0; k < num_triangles(); ++k) {
    if (k) os << "| ";
    for (std::size_t q = block_begin(k); q < block_end(k); ++q) os << (q == block_begin(k) ? "" : ", ") << at(q).to_string();
  }
  return os.str();
}

std::string VertexCatalog::dump_mask(const RankSelectBitVector& mask) const {
  std::ostringstream os;
  for (TriangleId k = 0; k < num_triangles(); ++k) {
    if (k) os << "| ";
    for (std::size_t q = block_begin(k); q < block_end(k); ++q) os << (q == block_begin(k) ? "" : ", ") << mask.get(q);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Growth

namespace {

// Clockwise order of boundary points of one triangle.
class BlockOrder {
 public:
  BlockOrder(const Scene& scene, TriangleId k) : scene_(scene), k_(k) {}

  int compare(VertexRef a, VertexRef b) const {
    const unsigned sa = slot(a), sb = slot(b);
    if (sa != sb) return sa < sb ? -1 : 1;
    if (a.is_corner() || b.is_corner()) {
      if (a.is_corner() && b.is_corner()) return 0;
      return a.is_corner() ? -1 : 1;
    }
    const BoundarySlot s = scene_.clockwise_slot(k_, sa);
    const int c = compare_along(scene_.project_corner(k_, s.from), scene_.project_corner(k_, s.to),
                                scene_.resolve_unchecked(a), scene_.resolve_unchecked(b));
    return -c;
  }

 private:
  unsigned slot(VertexRef v) const {
    if (v.is_corner()) {
      for (unsigned i = 0; i < 3; ++i)
        if (scene_.clockwise_slot(k_, i).from == v.corner_index()) return i;
    }
    return scene_.clockwise_slot_of_edge(k_, v.edge_on(k_));
  }

  const Scene& scene_;
  TriangleId k_;
};

void check_incident(TriangleId k, VertexRef v) {
  const bool ok = v.is_corner() ? v.triangle() == k
                                : edge_triangle(v.edge_a()) == k || edge_triangle(v.edge_b()) == k;
  if (!ok) throw InvariantError(v.to_string() + " is not on triangle " + std::to_string(k + 1));
}

}  // namespace

CatalogGrowth grow_level(const VertexCatalog& catalog, std::vector<std::pair<TriangleId, VertexRef>> new_vertices,
                         const Scene& scene) {
  std::sort(new_vertices.begin(), new_vertices.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<VertexRef> refs;
  refs.reserve(catalog.size() + new_vertices.size());
  std::vector<std::size_t> counts(catalog.num_triangles());
  CatalogGrowth out;
  out.newpos = PackedIntVector(catalog.size(), bits_for(catalog.size() + new_vertices.size()));

  std::size_t nv = 0;
  for (TriangleId k = 0; k < catalog.num_triangles(); ++k) {
    const std::size_t lo = nv;
    while (nv < new_vertices.size() && new_vertices[nv].first == k) ++nv;
    std::size_t q = catalog.block_begin(k);
    const std::size_t end = catalog.block_end(k);
    if (lo == nv) {
      for (; q < end; ++q) {
        out.newpos.set(q, refs.size());
        refs.push_back(catalog.at(q));
      }
      counts[k] = end - catalog.block_begin(k);
      continue;
    }
    const BlockOrder order(scene, k);
    std::vector<VertexRef> fresh;
    fresh.reserve(nv - lo);
    for (std::size_t i = lo; i < nv; ++i) {
      check_incident(k, new_vertices[i].second);
      fresh.push_back(new_vertices[i].second);
    }
    std::sort(fresh.begin(), fresh.end(), [&](VertexRef a, VertexRef b) { return order.compare(a, b) < 0; });
    for (std::size_t i = 1; i < fresh.size(); ++i) {
      if (fresh[i] == fresh[i - 1]) throw DuplicateVertex(fresh[i].to_string());
      if (order.compare(fresh[i - 1], fresh[i]) == 0) throw CyclicOrderViolation(fresh[i].to_string());
    }
    const std::size_t before = refs.size();
    std::size_t f = 0;
    while (q < end || f < fresh.size()) {
      int c;
      if (q == end)
        c = 1;
      else if (f == fresh.size())
        c = -1;
      else {
        const VertexRef old = catalog.at(q);
        if (old == fresh[f]) throw DuplicateVertex(old.to_string());
        c = order.compare(old, fresh[f]);
        if (c == 0) throw CyclicOrderViolation(fresh[f].to_string());
      }
      if (c < 0) {
        out.newpos.set(q, refs.size());
        refs.push_back(catalog.at(q++));
      } else {
        refs.push_back(fresh[f++]);
      }
    }
    counts[k] = refs.size() - before;
  }
  if (nv != new_vertices.size()) throw InvariantError("new vertex on a triangle outside the catalog");

  // Old pairs keep their partners through newpos; new crossings are paired by value.
  std::vector<std::uint64_t> cross(refs.size());
  std::vector<bool> is_old(refs.size(), false);
  for (std::size_t q = 0; q < catalog.size(); ++q) {
    const std::size_t p = out.newpos[q];
    cross[p] = out.newpos[catalog.cross(q)];
    is_old[p] = true;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> occ;
  for (std::size_t p = 0; p < refs.size(); ++p) {
    if (is_old[p]) continue;
    cross[p] = p;
    if (refs[p].is_crossing()) occ.emplace_back(refs[p].raw(), p);
  }
  std::sort(occ.begin(), occ.end());
  for (std::size_t i = 0; i < occ.size(); i += 2) {
    if (i + 1 >= occ.size() || occ[i].first != occ[i + 1].first)
      throw InvariantError("new crossing " + VertexRef::from_raw(occ[i].first).to_string() +
                           " supplied for only one triangle");
    cross[occ[i].second] = occ[i + 1].second;
    cross[occ[i + 1].second] = occ[i].second;
  }
  out.catalog = CatalogBuilder::build(refs, cross, counts, catalog.level() + 1, scene.num_edges());
  return out;
}

RankSelectBitVector remap_mask(const RankSelectBitVector& mask, const PackedIntVector& newpos, std::size_t new_size) {
  BitVector bits(new_size);
  const std::size_t ones = mask.count_ones();
  for (std::size_t r = 1; r <= ones; ++r) bits.set(newpos[mask.select(r)]);
  return RankSelectBitVector(std::move(bits));
}

void remap_starts(NodeMask& node, const PackedIntVector& newpos, std::size_t new_size) {
  PackedIntVector s(node.starts.size(), bits_for(new_size == 0 ? 0 : new_size - 1));
  for (std::size_t i = 0; i < s.size(); ++i) s.set(i, newpos[node.starts[i]]);
  node.starts = std::move(s);
}

// ---------------------------------------------------------------------------
// Marking

NodeMask mark_union_boundary(const VertexCatalog& catalog, BitVector& level_bits, std::uint32_t node,
                             TriangleId first, std::size_t count, const Region& region) {
  BitVector tri(count);
  std::vector<std::uint64_t> starts;
  auto position = [&](TriangleId k, VertexRef v) {
    if (k < first || k >= first + count)
      throw MaskConflict(v.to_string() + " on triangle " + std::to_string(k + 1) + " outside node " +
                         std::to_string(node));
    auto q = catalog.find(k, v);
    if (!q) throw InvariantError(v.to_string() + " missing from block " + std::to_string(k + 1));
    return *q;
  };
  auto mark = [&](TriangleId k, VertexRef v) {
    const std::size_t q = position(k, v);
    if (level_bits.get(q)) throw MaskConflict(v.to_string() + " in node " + std::to_string(node));
    level_bits.set(q);
    tri.set(k - first);
  };
  for (const auto& c : region.cycles) {
    const auto& vs = c.vertices;
    for (VertexRef v : vs) {
      if (v.is_corner()) {
        mark(v.triangle(), v);
      } else {
        mark(edge_triangle(v.edge_a()), v);
        mark(edge_triangle(v.edge_b()), v);
      }
    }
    // Start at the occurrence the walk arrives at: the block of the incoming fragment.
    const VertexRef v0 = vs.front();
    TriangleId k0 = v0.is_corner() ? v0.triangle() : 0;
    if (v0.is_crossing()) {
      const auto e = common_edge(vs.back(), v0);
      if (!e) throw InvariantError("cycle vertices share no edge at " + v0.to_string());
      k0 = edge_triangle(*e);
    }
    starts.push_back(position(k0, v0));
  }
  NodeMask nm;
  nm.node = node;
  nm.first = first;
  nm.triangles = RankSelectBitVector(std::move(tri));
  nm.starts = PackedIntVector::from_range(starts.begin(), starts.end(),
                                          bits_for(catalog.size() == 0 ? 0 : catalog.size() - 1));
  return nm;
}

// ---------------------------------------------------------------------------
// Reconstruction

class UnionWalker {
 public:
  UnionWalker(const VertexCatalog& catalog, const RankSelectBitVector& mask, const NodeMask& node,
              WalkScratch& scratch, const Scene* scene)
      : c_(catalog), mask_(mask), node_(node), s_(scratch), scene_(scene) {}

  ~UnionWalker() {
    // Undo the coloring for every triangle of the node.
    const std::size_t ones = node_.triangles.count_ones();
    for (std::size_t r = 1; r <= ones; ++r) {
      const TriangleId k = node_.first + static_cast<TriangleId>(node_.triangles.select(r));
      s_.black_.set(k, false);
      s_.counters_[k] = 0;
    }
  }

  std::vector<std::vector<std::size_t>> run() {
    for (std::size_t i = 0; i < node_.starts.size(); ++i) walk_from(node_.starts[i]);
    while (auto start = fallback_start()) walk_from(*start);
    return std::move(cycles_);
  }

 private:
  bool in_node(TriangleId k) const {
    return k >= node_.first && k - node_.first < node_.triangles.size() && node_.triangles.get(k - node_.first);
  }

  void visit(TriangleId k) {
    if (!in_node(k)) throw NonClosingWalk("walk left node " + std::to_string(node_.node));
    const std::size_t masked = mask_.count_range(c_.block_begin(k), c_.block_end(k) - 1);
    if (++s_.counters_[k] > masked) throw NonClosingWalk("triangle " + std::to_string(k + 1) + " visited too often");
    if (s_.counters_[k] == masked) s_.black_.set(k);
  }

  void walk_from(std::size_t start) {
    const std::size_t limit = 2 * c_.size() + 2;
    std::vector<std::size_t> cyc;
    std::size_t q = start;
    std::size_t steps = 0;
    do {
      if (++steps > limit) throw NonClosingWalk("no return to position " + std::to_string(start));
      if (!mask_.get(q)) throw NonClosingWalk("reached unmasked position " + std::to_string(q));
      cyc.push_back(q);
      TriangleId k = c_.triangle_at(q);
      visit(k);
      if (c_.has_cross(q)) {
        q = c_.cross(q);
        if (!mask_.get(q)) throw NonClosingWalk("partner of a crossing is unmasked at " + std::to_string(q));
        k = c_.triangle_at(q);
        visit(k);
      }
      q = mask_.next_one_cyclic(c_.block_begin(k), c_.block_end(k) - 1, q);
    } while (q != start);
    cycles_.push_back(std::move(cyc));
  }

  // A masked position of a white triangle not yet on any walked cycle.
  std::optional<std::size_t> fallback_start() {
    const std::size_t ones = node_.triangles.count_ones();
    for (std::size_t r = 1; r <= ones; ++r) {
      const TriangleId k = node_.first + static_cast<TriangleId>(node_.triangles.select(r));
      if (s_.black_.get(k)) continue;
      if (visited_.empty())
        for (const auto& cyc : cycles_)
          for (std::size_t q : cyc) {
            visited_.insert(q);
            visited_.insert(c_.cross(q));
          }
      const std::size_t lo = c_.block_begin(k);
      for (std::size_t j = mask_.rank(lo) + 1; j <= mask_.count_ones(); ++j) {
        const std::size_t q = mask_.select(j);
        if (q >= c_.block_end(k)) break;
        if (visited_.count(q)) continue;
        visited_.clear();
        if (!c_.has_cross(q)) return q;
        if (!scene_) throw InvariantError("start occurrence of a crossing needs geometry");
        return departs_along(k, c_.at(q)) ? c_.cross(q) : q;
      }
      throw OrphanVertex("triangle " + std::to_string(k + 1) + " of node " + std::to_string(node_.node) +
                         " keeps unvisited masked vertices");
    }
    return std::nullopt;
  }

  // True when the boundary leaves crossing x along triangle k's clockwise direction.
  bool departs_along(TriangleId k, VertexRef x) const {
    const Scene& s = *scene_;
    const TriangleId k2 = x.partner(k);
    const BoundarySlot a = s.clockwise_slot(k, s.clockwise_slot_of_edge(k, x.edge_on(k)));
    const BoundarySlot b = s.clockwise_slot(k2, s.clockwise_slot_of_edge(k2, x.edge_on(k2)));
    return orientation(s.project_corner(k2, b.from), s.project_corner(k2, b.to), s.project_corner(k, a.to)) ==
           Orientation::left;
  }

  const VertexCatalog& c_;
  const RankSelectBitVector& mask_;
  const NodeMask& node_;
  WalkScratch& s_;
  const Scene* scene_;
  std::vector<std::vector<std::size_t>> cycles_;
  std::unordered_set<std::size_t> visited_;
};

std::vector<std::vector<std::size_t>> walk_union(const VertexCatalog& catalog, const RankSelectBitVector& mask,
                                                 const NodeMask& node, WalkScratch& scratch, const Scene* scene) {
  return UnionWalker(catalog, mask, node, scratch, scene).run();
}

Region reconstruct_union(const VertexCatalog& catalog, const RankSelectBitVector& mask, const NodeMask& node,
                         WalkScratch& scratch, const Scene& scene) {
  Region out;
  for (const auto& cyc : walk_union(catalog, mask, node, scratch, &scene)) {
    Cycle c;
    c.vertices.reserve(cyc.size());
    for (std::size_t q : cyc) c.vertices.push_back(catalog.at(q));
    c.hole = cycle_is_hole(c.vertices, scene);
    out.cycles.push_back(std::move(c));
  }
  normalize(out);
  return out;
}

}  // namespace hsr

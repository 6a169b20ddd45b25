#include "hsr/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hsr/errors.hpp"

namespace hsr {

thread_local std::size_t VisibilityRegion::live_ = 0;
thread_local std::size_t VisibilityRegion::peak_ = 0;

// ---------------------------------------------------------------------------
// Union tree

unsigned UnionTree::level_of(std::uint32_t node) const {
  const unsigned depth = static_cast<unsigned>(std::bit_width(node)) - 1;
  return levels_ - depth;
}

std::pair<TriangleId, std::size_t> UnionTree::triangle_range(std::uint32_t node) const {
  const unsigned depth = static_cast<unsigned>(std::bit_width(node)) - 1;
  const std::size_t span = n_ >> depth;
  return {static_cast<TriangleId>((node - (1u << depth)) * span), span};
}

Region UnionTree::reconstruct(std::uint32_t node, WalkScratch& scratch) const {
  return reconstruct_union(catalog_, level_mask(level_of(node)).bits, node_mask(node), scratch, *scene_);
}

Region UnionTree::reconstruct(std::uint32_t node) const {
  WalkScratch scratch(n_);
  return reconstruct(node, scratch);
}

UnionTree UnionTree::build(const Scene& scene, const LevelHook& hook) {
  const std::size_t n = scene.size();
  if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("union tree needs a power-of-two scene");
  const std::size_t cells_base = RealCells::live();
  RealCells::reset_peak();

  UnionTree tree;
  tree.scene_ = &scene;
  tree.n_ = n;
  tree.levels_ = static_cast<unsigned>(std::bit_width(n));
  SpaceStats& st = tree.stats_;
  st.n = n;
  st.levels = tree.levels_;

  tree.catalog_ = VertexCatalog::leaf_level(scene);
  st.catalog_bits = tree.catalog_.capacity_bits();
  tree.node_masks_.resize(2 * n);
  {
    BitVector bits(tree.catalog_.size());
    for (TriangleId t = 0; t < n; ++t) {
      const auto node = static_cast<std::uint32_t>(n + t);
      tree.node_masks_[node] = mark_union_boundary(tree.catalog_, bits, node, t, 1, Region::triangle(scene, t));
    }
    tree.level_masks_.push_back({1, RankSelectBitVector(std::move(bits))});
  }
  st.per_level_complexities.push_back(3 * n);
  if (hook) hook(tree.catalog_, tree.level_masks_);

  WalkScratch scratch(n);
  st.scratch_bits = scratch.capacity_bits();

  for (unsigned lv = 2; lv <= tree.levels_; ++lv) {
    const auto first = static_cast<std::uint32_t>(n >> (lv - 1));
    std::vector<Region> unions;
    unions.reserve(first);
    std::vector<std::pair<TriangleId, VertexRef>> fresh;
    std::size_t level_sum = 0;
    for (std::uint32_t w = first; w < 2 * first; ++w) {
      Region u;
      {
        const Region a = tree.reconstruct(2 * w, scratch);
        const Region b = tree.reconstruct(2 * w + 1, scratch);
        const auto x = boundary_crossings(a, b, scene, CrossingMode::strict);
        u = region_union(a, b, x, scene);
        for (const auto& c : u.cycles) {
          for (VertexRef v : c.vertices) {
            if (v.is_crossing() && std::binary_search(x.begin(), x.end(), v)) {
              fresh.emplace_back(edge_triangle(v.edge_a()), v);
              fresh.emplace_back(edge_triangle(v.edge_b()), v);
            }
          }
        }
      }
      level_sum += u.complexity();
      unions.push_back(std::move(u));
    }
    st.per_level_complexities.push_back(level_sum);
    st.union_buffer_refs_peak = std::max(st.union_buffer_refs_peak, level_sum);

    CatalogGrowth g = grow_level(tree.catalog_, std::move(fresh), scene);
    st.catalog_bits = std::max(st.catalog_bits, tree.catalog_.capacity_bits() + g.catalog.capacity_bits() +
                                                    g.newpos.capacity_bits());
    const std::size_t size = g.catalog.size();
    for (auto& lm : tree.level_masks_) lm.bits = remap_mask(lm.bits, g.newpos, size);
    for (std::size_t w = 2 * first; w < 2 * n; ++w) remap_starts(tree.node_masks_[w], g.newpos, size);
    tree.catalog_ = std::move(g.catalog);

    BitVector bits(size);
    for (std::uint32_t w = first; w < 2 * first; ++w) {
      auto [lo, count] = tree.triangle_range(w);
      tree.node_masks_[w] = mark_union_boundary(tree.catalog_, bits, w, lo, count, unions[w - first]);
    }
    tree.level_masks_.push_back({lv, RankSelectBitVector(std::move(bits))});
    if (hook) hook(tree.catalog_, tree.level_masks_);
  }

  for (std::size_t c : st.per_level_complexities) st.K_with_leaves += c;
  st.K_without_leaves = st.K_with_leaves - 3 * n;
  st.U_root_complexity = tree.reconstruct(1, scratch).complexity();
  for (const auto& lm : tree.level_masks_) st.mask_bits += lm.bits.capacity_bits();
  for (std::size_t w = 1; w < 2 * n; ++w) st.mask_bits += tree.node_masks_[w].capacity_bits();
  st.real_cells_peak = RealCells::peak() - cells_base;
  return tree;
}

std::string UnionTree::dump() const {
  std::ostringstream out;
  out << "C_" << levels_ << ": " << catalog_.dump() << "\n";
  for (const auto& lm : level_masks_) out << "B_{" << levels_ << "," << lm.level << "}: " << catalog_.dump_mask(lm.bits) << "\n";
  for (std::size_t w = 1; w < 2 * n_; ++w) {
    const NodeMask& m = node_masks_[w];
    out << "A_" << w << ":";
    for (std::size_t i = 0; i < m.triangles.size(); ++i) out << (m.triangles.get(i) ? " 1" : " 0");
    out << "  starts:";
    for (std::size_t i = 0; i < m.starts.size(); ++i) out << " " << m.starts[i] + 1;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Visibility regions

VisibilityRegion::VisibilityRegion(const UnionTree& tree, std::uint32_t node, const Region& region) : node_(node) {
  const VertexCatalog& cat = tree.catalog();
  std::vector<std::size_t> positions;
  std::vector<std::int64_t> found;  // catalog position, or -1
  for (const auto& c : region.cycles) {
    for (VertexRef v : c.vertices) {
      const TriangleId k = v.is_corner() ? v.triangle() : edge_triangle(v.edge_a());
      auto q = cat.find(k, v);
      if (q) {
        positions.push_back(*q);
        found.push_back(static_cast<std::int64_t>(*q));
      } else {
        extra_.push_back(v);
        found.push_back(-1);
      }
    }
  }
  std::sort(extra_.begin(), extra_.end());
  extra_.erase(std::unique(extra_.begin(), extra_.end()), extra_.end());
  extra_.shrink_to_fit();
  BitVector bits(cat.size());
  for (std::size_t q : positions) bits.set(q);
  bits_ = RankSelectBitVector(std::move(bits));

  const std::size_t ones = bits_.count_ones();
  const std::size_t alphabet = ones + extra_.size();
  codes_ = PackedIntVector(found.size(), bits_for(alphabet == 0 ? 0 : alphabet - 1));
  cycle_ends_ = PackedIntVector(region.cycles.size(), bits_for(found.size()));
  holes_ = BitVector(region.cycles.size());
  std::size_t i = 0;
  for (std::size_t ci = 0; ci < region.cycles.size(); ++ci) {
    for (VertexRef v : region.cycles[ci].vertices) {
      std::size_t code;
      if (found[i] >= 0)
        code = bits_.rank(static_cast<std::size_t>(found[i]));
      else
        code = ones + static_cast<std::size_t>(std::lower_bound(extra_.begin(), extra_.end(), v) - extra_.begin());
      codes_.set(i++, code);
    }
    cycle_ends_.set(ci, i);
    holes_.set(ci, region.cycles[ci].hole);
  }
  ++live_;
  peak_ = std::max(peak_, live_);
}

VisibilityRegion::VisibilityRegion(VisibilityRegion&& o) noexcept
    : node_(o.node_),
      bits_(std::move(o.bits_)),
      extra_(std::move(o.extra_)),
      codes_(std::move(o.codes_)),
      cycle_ends_(std::move(o.cycle_ends_)),
      holes_(std::move(o.holes_)) {
  o.alive_ = false;
}

VisibilityRegion::~VisibilityRegion() {
  if (alive_) --live_;
}

Region VisibilityRegion::region(const UnionTree& tree) const {
  const VertexCatalog& cat = tree.catalog();
  const std::size_t ones = bits_.count_ones();
  Region r;
  std::size_t i = 0;
  for (std::size_t ci = 0; ci < cycle_ends_.size(); ++ci) {
    Cycle c;
    c.hole = holes_.get(ci);
    for (const std::size_t end = cycle_ends_[ci]; i < end; ++i) {
      const std::size_t code = codes_[i];
      c.vertices.push_back(code < ones ? cat.at(bits_.select(code + 1)) : extra_[code - ones]);
    }
    r.cycles.push_back(std::move(c));
  }
  return r;
}

std::size_t VisibilityRegion::capacity_bits() const {
  return bits_.capacity_bits() + extra_.capacity() * 64 + codes_.capacity_bits() + cycle_ends_.capacity_bits() +
         holes_.words().capacity() * 64;
}

// ---------------------------------------------------------------------------
// Visibility

std::size_t VisibilityMap::k() const {
  std::size_t k = 0;
  for (const auto& p : portions) k += p.complexity();
  return k;
}

namespace {

class Traversal {
 public:
  Traversal(const UnionTree& tree, VisibilityMap& map, SpaceStats& stats)
      : tree_(tree), scene_(tree.scene()), map_(map), stats_(stats), scratch_(tree.num_leaves()) {}

  void visit(std::uint32_t w, std::unique_ptr<VisibilityRegion> vw) {
    const std::size_t n = tree_.num_leaves();
    if (w >= n) {
      const TriangleId t = static_cast<TriangleId>(w - n);
      if (!scene_.is_padding(t)) map_.portions[t - scene_.padding()] = vw->region(tree_);
      release(vw);
      return;
    }
    if (vw->empty()) {
      release(vw);
      return;
    }
    std::unique_ptr<VisibilityRegion> near, far;
    {
      const Region v = vw->region(tree_);
      const Region ur = tree_.reconstruct(2 * w + 1, scratch_);
      const auto x = boundary_crossings(v, ur, scene_, CrossingMode::tolerant);
      auto [in, out] = region_split(v, ur, x, scene_);
      near = hold(2 * w + 1, in);
      far = hold(2 * w, out);
    }
    release(vw);
    visit(2 * w, std::move(far));
    visit(2 * w + 1, std::move(near));
  }

  std::unique_ptr<VisibilityRegion> hold(std::uint32_t node, const Region& region) {
    auto v = std::make_unique<VisibilityRegion>(tree_, node, region);
    live_bits_ += v->capacity_bits();
    live_overflow_ += v->overflow_size();
    stats_.overflow_refs_total += v->overflow_size();
    stats_.overflow_refs = std::max(stats_.overflow_refs, live_overflow_);
    stats_.visibility_bits_peak = std::max(stats_.visibility_bits_peak, live_bits_);
    return v;
  }

 private:
  void release(std::unique_ptr<VisibilityRegion>& v) {
    live_bits_ -= v->capacity_bits();
    live_overflow_ -= v->overflow_size();
    v.reset();
  }

  const UnionTree& tree_;
  const Scene& scene_;
  VisibilityMap& map_;
  SpaceStats& stats_;
  WalkScratch scratch_;
  std::size_t live_bits_ = 0;
  std::size_t live_overflow_ = 0;
};

}  // namespace

VisibilityMap compute_visibility(const UnionTree& tree, SpaceStats* stats) {
  const Scene& scene = tree.scene();
  VisibilityMap map;
  map.padding = scene.padding();
  map.portions.resize(scene.original_size());
  SpaceStats local;
  SpaceStats& st = stats ? *stats : local;

  const std::size_t cells_base = RealCells::live();
  RealCells::reset_peak();
  const std::size_t regions_base = VisibilityRegion::live();
  VisibilityRegion::reset_peak();
  {
    Traversal walk(tree, map, st);
    std::unique_ptr<VisibilityRegion> root;
    {
      WalkScratch scratch(tree.num_leaves());
      root = walk.hold(1, tree.reconstruct(1, scratch));
    }
    walk.visit(1, std::move(root));
  }
  st.live_regions_peak = std::max(st.live_regions_peak, VisibilityRegion::peak() - regions_base);
  st.real_cells_peak = std::max(st.real_cells_peak, RealCells::peak() - cells_base);
  for (auto& p : map.portions) normalize(p);
  return map;
}

// ---------------------------------------------------------------------------
// Output helpers

std::vector<Polygon> polygons(const Region& region, const Scene& scene) {
  std::vector<Polygon> out;
  std::vector<Region> outer_regions;
  std::vector<Rational> outer_areas;
  for (const auto& c : region.cycles) {
    if (c.hole) continue;
    out.push_back({c.vertices, {}});
    Region single;
    single.cycles.push_back(c);
    outer_areas.push_back(region_area(single, scene));
    outer_regions.push_back(std::move(single));
  }
  for (const auto& c : region.cycles) {
    if (!c.hole) continue;
    // A hole vertex lies strictly inside its outer cycle unless it touches it;
    // the midpoint of the first hole edge is tried after the vertices.
    std::size_t best = out.size();
    for (std::size_t i = 0; i < outer_regions.size(); ++i) {
      Location loc = Location::on_boundary;
      for (std::size_t j = 0; j < c.vertices.size() && loc == Location::on_boundary; ++j)
        loc = point_in_region(outer_regions[i], scene.resolve_unchecked(c.vertices[j]), scene);
      if (loc == Location::on_boundary) {
        const HPoint m = midpoint(scene.resolve_unchecked(c.vertices[0]), scene.resolve_unchecked(c.vertices[1]));
        loc = point_in_region(outer_regions[i], m, scene);
      }
      if (loc == Location::inside && (best == out.size() || outer_areas[i] < outer_areas[best])) best = i;
    }
    if (best == out.size()) throw InvariantError("hole outside every outer cycle");
    out[best].holes.push_back(c.vertices);
  }
  return out;
}

std::vector<Polygon3> back_project(const Region& portion, TriangleId t, const Scene& scene) {
  std::vector<Polygon3> out;
  auto lift = [&](const std::vector<VertexRef>& cycle) {
    std::vector<RPoint3> pts;
    pts.reserve(cycle.size());
    for (VertexRef v : cycle) pts.push_back(scene.back_project(t, scene.resolve_unchecked(v)));
    return pts;
  };
  for (const auto& poly : polygons(portion, scene)) {
    Polygon3 p;
    p.outer = lift(poly.outer);
    for (const auto& h : poly.holes) p.holes.push_back(lift(h));
    out.push_back(std::move(p));
  }
  return out;
}

PipelineResult run_pipeline(const Scene& scene) {
  PipelineResult r{pad_to_power_of_two(scene), {}, {}};
  validate_depth_order(r.padded.scene);
  const UnionTree tree = UnionTree::build(r.padded.scene);
  r.stats = tree.stats();
  r.map = compute_visibility(tree, &r.stats);
  return r;
}

}  // namespace hsr

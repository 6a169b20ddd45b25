#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hsr/catalog.hpp"
#include "hsr/overlay.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Bit-exact space figures for one run. Bits are allocated container capacity.
struct SpaceStats {
  std::size_t n = 0;  // leaves, after padding
  std::size_t levels = 0;
  std::size_t U_root_complexity = 0;
  std::size_t K_with_leaves = 0;
  std::size_t K_without_leaves = 0;
  /// Peak over the build of the live catalogs plus the growth position map.
  std::size_t catalog_bits = 0;
  /// All level masks and node masks (triangle bits, start pointers, rank-select aux).
  std::size_t mask_bits = 0;
  /// Colors and counters of the boundary walker.
  std::size_t scratch_bits = 0;
  /// Peak bits of live visibility regions (mask, cycle codes, overflow refs).
  std::size_t visibility_bits_peak = 0;
  /// Peak number of overflow refs alive at once, and the total ever created.
  std::size_t overflow_refs = 0;
  std::size_t overflow_refs_total = 0;
  /// Largest per-level buffer of freshly computed unions, in vertex refs.
  std::size_t union_buffer_refs_peak = 0;
  std::size_t real_cells_peak = 0;
  std::size_t live_regions_peak = 0;
  std::vector<std::size_t> per_level_complexities;
};

/// Complete binary tree over the (padded) triangles in heap numbering: node 1 is
/// the root, node w has children 2w (far) and 2w + 1 (near), and leaf n + t holds
/// triangle t. Level 1 is the leaves; the root is on level log2(n) + 1.
class UnionTree {
 public:
  /// Called after each level with the catalog and the masks remapped onto it.
  using LevelHook = std::function<void(const VertexCatalog&, const std::vector<LevelMask>&)>;

  /// Builds the partial unions level by level. The scene size must be a power of two.
  static UnionTree build(const Scene& scene, const LevelHook& hook = {});

  const Scene& scene() const { return *scene_; }
  std::size_t num_leaves() const { return n_; }
  unsigned levels() const { return levels_; }
  unsigned level_of(std::uint32_t node) const;
  /// First triangle and number of triangles below node.
  std::pair<TriangleId, std::size_t> triangle_range(std::uint32_t node) const;

  const VertexCatalog& catalog() const { return catalog_; }
  const LevelMask& level_mask(unsigned level) const { return level_masks_.at(level - 1); }
  const NodeMask& node_mask(std::uint32_t node) const { return node_masks_.at(node); }

  Region reconstruct(std::uint32_t node, WalkScratch& scratch) const;
  Region reconstruct(std::uint32_t node) const;

  const SpaceStats& stats() const { return stats_; }
  SpaceStats& stats() { return stats_; }

  /// Table-style dump: the catalog and every level mask B_{i,j} remapped to it.
  std::string dump() const;

 private:
  const Scene* scene_ = nullptr;
  std::size_t n_ = 0;
  unsigned levels_ = 0;
  VertexCatalog catalog_;
  std::vector<LevelMask> level_masks_;
  std::vector<NodeMask> node_masks_;  // indexed by node; [0] unused
  SpaceStats stats_;
};

/// Visible portion of one node: boundary vertices found in the final catalog
/// are mask bits; the rest are overflow refs. Cycles are stored as packed codes
/// (rank among the mask bits, or mask popcount + overflow index).
class VisibilityRegion {
 public:
  VisibilityRegion(const UnionTree& tree, std::uint32_t node, const Region& region);
  VisibilityRegion(const VisibilityRegion&) = delete;
  VisibilityRegion& operator=(const VisibilityRegion&) = delete;
  VisibilityRegion(VisibilityRegion&& o) noexcept;
  VisibilityRegion& operator=(VisibilityRegion&&) = delete;
  ~VisibilityRegion();

  std::uint32_t node() const { return node_; }
  bool empty() const { return cycle_ends_.empty(); }
  Region region(const UnionTree& tree) const;
  std::size_t overflow_size() const { return extra_.size(); }
  std::size_t capacity_bits() const;

  static std::size_t live() { return live_; }
  static std::size_t peak() { return peak_; }
  static void reset_peak() { peak_ = live_; }

 private:
  std::uint32_t node_ = 0;
  bool alive_ = true;
  RankSelectBitVector bits_;
  std::vector<VertexRef> extra_;
  PackedIntVector codes_;
  PackedIntVector cycle_ends_;
  BitVector holes_;

  static thread_local std::size_t live_;
  static thread_local std::size_t peak_;
};

/// Visible parts of every original (non-padding) triangle; entry i belongs to
/// scene triangle padding + i.
struct VisibilityMap {
  std::vector<Region> portions;
  std::size_t padding = 0;

  /// Total number of output vertices.
  std::size_t k() const;
  friend bool operator==(const VisibilityMap&, const VisibilityMap&) = default;
};

/// Outer cycle with the holes lying inside it.
struct Polygon {
  std::vector<VertexRef> outer;
  std::vector<std::vector<VertexRef>> holes;
};

/// Groups a region's holes under the smallest outer cycle containing them.
std::vector<Polygon> polygons(const Region& region, const Scene& scene);

/// Preorder traversal: V_root = U_root, V_near = V_w ∩ U_near, V_far = V_w \ U_near.
/// Live-region, overflow and real-cell figures are added to `stats` when given.
VisibilityMap compute_visibility(const UnionTree& tree, SpaceStats* stats = nullptr);

/// Outer cycles and holes back-projected onto triangle t's plane.
struct Polygon3 {
  std::vector<RPoint3> outer;
  std::vector<std::vector<RPoint3>> holes;
};
std::vector<Polygon3> back_project(const Region& portion, TriangleId t, const Scene& scene);

/// Pads, validates and runs both phases; the returned map refers to `padded`.
struct PipelineResult {
  PaddedScene padded;
  VisibilityMap map;
  SpaceStats stats;
};
PipelineResult run_pipeline(const Scene& scene);

}  // namespace hsr

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsr/overlay.hpp"
#include "hsr/packed_ints.hpp"
#include "hsr/rank_select.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Vertices that can appear on partial unions up to some level, stored per
/// triangle in clockwise boundary order and concatenated into one array.
///
/// Absolute positions are 0-based. Each crossing occurs twice (once in each
/// incident triangle's block) and the two occurrences point at each other;
/// corners occur once and point at themselves. Only packed integers are kept:
/// vertex refs, cross pointers and the prefix sums of the block sizes.
class VertexCatalog {
 public:
  VertexCatalog() = default;

  /// Level 1: the three corners of every triangle in clockwise order.
  static VertexCatalog leaf_level(const Scene& scene);
  /// Builds a catalog from explicit blocks; equal crossing refs are paired.
  static VertexCatalog from_blocks(const std::vector<std::vector<VertexRef>>& blocks, unsigned level,
                                   std::size_t num_edges);

  unsigned level() const { return level_; }
  std::size_t size() const { return refs_.size(); }
  std::size_t num_triangles() const { return prefix_.empty() ? 0 : prefix_.size() - 1; }

  std::size_t block_begin(TriangleId k) const { return prefix_[k]; }
  std::size_t block_end(TriangleId k) const { return prefix_[k + 1]; }
  std::size_t count(TriangleId k) const { return block_end(k) - block_begin(k); }

  /// Position of the r-th vertex (0-based) of triangle k; throws std::out_of_range.
  std::size_t abs_position(TriangleId k, std::size_t r) const;
  /// Inverse of abs_position, by predecessor search on the prefix sums.
  std::pair<TriangleId, std::size_t> rel_position(std::size_t q) const;
  TriangleId triangle_at(std::size_t q) const { return rel_position(q).first; }

  VertexRef at(std::size_t q) const { return unpack(refs_[q]); }
  bool has_cross(std::size_t q) const { return cross_[q] != q; }
  std::size_t cross(std::size_t q) const { return cross_[q]; }

  /// Position of v within triangle k's block, if present.
  std::optional<std::size_t> find(TriangleId k, VertexRef v) const;

  /// Allocated bits of refs, cross pointers and prefix sums.
  std::size_t capacity_bits() const {
    return refs_.capacity_bits() + cross_.capacity_bits() + prefix_.capacity_bits();
  }

  /// Blocks separated by "|", e.g. "c0.0, x3:7, c0.1| ...".
  std::string dump() const;
  /// Mask rendered with the catalog's block structure, e.g. "1, 0, 1| 1, 1".
  std::string dump_mask(const RankSelectBitVector& mask) const;

 private:
  friend struct CatalogBuilder;

  std::uint64_t pack(VertexRef v) const;
  VertexRef unpack(std::uint64_t packed) const;

  PackedIntVector refs_;
  PackedIntVector cross_;
  PackedIntVector prefix_;
  unsigned edge_bits_ = 1;
  unsigned level_ = 1;
};

/// Catalog after a growth step, with the old-to-new position map.
struct CatalogGrowth {
  VertexCatalog catalog;
  PackedIntVector newpos;
};

/// Inserts new vertices (one entry per incident triangle) at their clockwise
/// positions. Throws DuplicateVertex or CyclicOrderViolation.
CatalogGrowth grow_level(const VertexCatalog& catalog, std::vector<std::pair<TriangleId, VertexRef>> new_vertices,
                         const Scene& scene);

/// B_{i+1,j}[newpos(q)] = B_{i,j}[q]; inserted positions get zeros.
RankSelectBitVector remap_mask(const RankSelectBitVector& mask, const PackedIntVector& newpos, std::size_t new_size);

/// Bits of one level: which catalog vertices lie on that level's partial unions.
struct LevelMask {
  unsigned level = 1;
  RankSelectBitVector bits;
};

/// Per-node data: which of the subtree's triangles touch U_w's boundary, and
/// one start position per boundary cycle.
struct NodeMask {
  std::uint32_t node = 0;
  TriangleId first = 0;  // first triangle of the subtree
  RankSelectBitVector triangles;
  PackedIntVector starts;

  std::size_t capacity_bits() const { return triangles.capacity_bits() + starts.capacity_bits(); }
};

void remap_starts(NodeMask& node, const PackedIntVector& newpos, std::size_t new_size);

/// Marks U_w's boundary vertices in a level under construction and returns
/// the node's triangle mask and start pointers. `subtree` is the node's
/// triangle range [first, first + count). Throws MaskConflict.
NodeMask mark_union_boundary(const VertexCatalog& catalog, BitVector& level_bits, std::uint32_t node,
                             TriangleId first, std::size_t count, const Region& region);

/// Colors and counters shared by all reconstructions; restored after each use.
class WalkScratch {
 public:
  explicit WalkScratch(std::size_t num_triangles) : black_(num_triangles), counters_(num_triangles, 0) {}
  std::size_t capacity_bits() const { return black_.words().capacity() * 64 + counters_.capacity() * 32; }

 private:
  friend class UnionWalker;
  BitVector black_;
  std::vector<std::uint32_t> counters_;
};

/// Boundary cycles of U_w as absolute catalog positions (one position per vertex:
/// the occurrence at which the walk arrives).
std::vector<std::vector<std::size_t>> walk_union(const VertexCatalog& catalog, const RankSelectBitVector& mask,
                                                 const NodeMask& node, WalkScratch& scratch, const Scene* scene);

/// Same, converted to a normalized region.
Region reconstruct_union(const VertexCatalog& catalog, const RankSelectBitVector& mask, const NodeMask& node,
                         WalkScratch& scratch, const Scene& scene);

}  // namespace hsr

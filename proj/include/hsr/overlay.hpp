#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsr/exact.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Closed boundary cycle of implicit vertices. Outer cycles run clockwise and
/// holes counterclockwise, so the interior is always on the right.
struct Cycle {
  std::vector<VertexRef> vertices;
  bool hole = false;

  friend bool operator==(const Cycle&, const Cycle&) = default;
  friend auto operator<=>(const Cycle& a, const Cycle& b) {
    return std::lexicographical_compare_three_way(a.vertices.begin(), a.vertices.end(), b.vertices.begin(),
                                                  b.vertices.end());
  }
};

/// Planar region bounded by edge fragments of projected triangles; may have holes.
struct Region {
  std::vector<Cycle> cycles;

  bool empty() const { return cycles.empty(); }
  /// Total number of boundary vertices.
  std::size_t complexity() const;
  /// Clockwise boundary of a single projected triangle.
  static Region triangle(const Scene& scene, TriangleId t);

  friend bool operator==(const Region&, const Region&) = default;
};

/// Rotates every cycle to start at its smallest ref and sorts the cycles, so
/// that equal regions compare equal.
void normalize(Region& region);

/// Fragment of a region boundary: `from` to `to` along one projected edge.
struct Fragment {
  VertexRef from, to;
  EdgeId edge;
};
std::vector<Fragment> fragments(const Region& region);

enum class CrossingMode {
  /// Any contact other than a proper crossing throws DegeneracyDetected.
  strict,
  /// Touching and shared boundary pieces are skipped silently.
  tolerant,
};

/// Proper crossings between A's and B's boundaries, sorted and without duplicates.
std::vector<VertexRef> boundary_crossings(const Region& a, const Region& b, const Scene& scene,
                                          CrossingMode mode = CrossingMode::strict);

Region region_union(const Region& a, const Region& b, std::span<const VertexRef> crossings, const Scene& scene);
Region region_intersection(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                           const Scene& scene);
Region region_difference(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                         const Scene& scene);
/// Intersection and difference of the same pair, sharing one overlay.
std::pair<Region, Region> region_split(const Region& a, const Region& b, std::span<const VertexRef> crossings,
                                       const Scene& scene);

enum class Location { inside, outside, on_boundary };

/// Exact ray-parity classification of a plane point.
Location point_in_region(const Region& region, const HPoint& point, const Scene& scene);

/// Exact area of the region (outer areas minus hole areas).
Rational region_area(const Region& region, const Scene& scene);

/// True for a counterclockwise (hole) cycle.
bool cycle_is_hole(const std::vector<VertexRef>& cycle, const Scene& scene);

/// Human-readable dump, one cycle per line.
std::string to_string(const Region& region);

}  // namespace hsr

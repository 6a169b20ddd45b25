#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsr/overlay.hpp"
#include "hsr/pipeline.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Brute-force visibility: every projected edge is cut at all its crossings,
/// the frontmost triangle on both sides of each piece is found by direct ray
/// depth comparison, and the pieces separating different winners are stitched
/// into cycles. Does not look at the depth order. Indices refer to `scene`
/// (padding triangles, if any, are skipped like in the pipeline).
VisibilityMap trivial_viewshed(const Scene& scene);

/// Number of pairwise proper crossings between projected edges.
std::size_t count_edge_crossings(const Scene& scene);

/// Iterated region_union over the given triangles.
Region naive_union(const Scene& scene, std::span<const TriangleId> triangles);
Region naive_union(const Scene& scene, TriangleId first, std::size_t count);

/// Scene as generated: rational coordinates with terminating decimal expansions.
struct GeneratedScene {
  RPoint3 viewpoint;
  std::vector<RTriangle3> triangles;

  Scene scene() const { return Scene::from_rational(viewpoint, triangles); }
};

/// Random triangles on parallel planes z = 1 + (n - t)/1024 seen from the origin
/// (triangle 0 farthest), redrawn until the projection is in general position.
GeneratedScene gen_random(std::size_t n, std::uint64_t seed);

/// Clusters of eight long thin sticks, one cluster per grid cell. The sticks of
/// a cluster cross pairwise near the cell center and their directions follow
/// the 3-bit reversal of the leaf index, so sibling subtrees always cross.
/// Partial unions inside a cluster are much more complex than the triangles
/// they cover. n must be a power of two, at least 8.
GeneratedScene gen_worst_case(std::size_t n);

/// Triangles inside the cells of a square grid, so no two projections meet.
GeneratedScene gen_disjoint(std::size_t n, std::uint64_t seed);

}  // namespace hsr

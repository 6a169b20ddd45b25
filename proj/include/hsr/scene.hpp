#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsr/exact.hpp"

namespace hsr {

struct RPoint3 {
  Rational x, y, z;
  friend bool operator==(const RPoint3&, const RPoint3&) = default;
};

struct RPoint2 {
  Rational x, y;
  friend bool operator==(const RPoint2&, const RPoint2&) = default;
};

using RTriangle3 = std::array<RPoint3, 3>;

/// Integer 3-vector; scene coordinates are stored scaled to integers.
struct IVec3 {
  Int x, y, z;
  friend bool operator==(const IVec3&, const IVec3&) = default;
};

/// Central projection onto a plane: a 3D point X maps to plane coordinates
/// ((X - eye).u / (X - eye).normal, (X - eye).w / (X - eye).normal).
/// The plane is normal . (X - eye) = 1; u and w must be orthogonal to normal
/// and to each other.
struct ProjectionFrame {
  RPoint3 eye;
  RPoint3 normal, u, w;
};

/// Projects a point through the frame's eye. Throws DegenerateRay when the point
/// is the eye and ValidationError when it is not strictly in front of the eye.
RPoint2 project(const ProjectionFrame& frame, const RPoint3& point);

using TriangleId = std::uint32_t;
using EdgeId = std::uint32_t;

inline EdgeId edge_id(TriangleId t, unsigned corner) { return 3 * t + corner; }
inline TriangleId edge_triangle(EdgeId e) { return e / 3; }

/// Implicit vertex of the projection plane: a triangle corner, or the crossing
/// of two projected edges identified by their global edge ids (0-based;
/// edge c of triangle t runs from corner c to corner c+1 and has id 3t + c).
class VertexRef {
 public:
  VertexRef() = default;

  static VertexRef corner(TriangleId t, unsigned c) {
    return VertexRef((static_cast<std::uint64_t>(3 * t + c) << 1));
  }
  /// Canonical crossing: the edge ids are stored in increasing order.
  static VertexRef crossing(EdgeId a, EdgeId b) {
    if (a > b) std::swap(a, b);
    return VertexRef((static_cast<std::uint64_t>(a) << 33) | (static_cast<std::uint64_t>(b) << 1) | 1u);
  }
  static VertexRef from_raw(std::uint64_t raw) { return VertexRef(raw); }

  bool is_corner() const { return (raw_ & 1u) == 0; }
  bool is_crossing() const { return !is_corner(); }
  TriangleId triangle() const { return static_cast<TriangleId>((raw_ >> 1) / 3); }
  unsigned corner_index() const { return static_cast<unsigned>((raw_ >> 1) % 3); }
  EdgeId edge_a() const { return static_cast<EdgeId>(raw_ >> 33); }
  EdgeId edge_b() const { return static_cast<EdgeId>((raw_ >> 1) & 0xffffffffu); }

  /// The two edges through this vertex (for a corner: the edges meeting there).
  std::pair<EdgeId, EdgeId> edges() const {
    if (is_crossing()) return {edge_a(), edge_b()};
    const TriangleId t = triangle();
    const unsigned c = corner_index();
    return {edge_id(t, c), edge_id(t, (c + 2) % 3)};
  }
  bool on_edge(EdgeId e) const {
    auto [a, b] = edges();
    return a == e || b == e;
  }
  /// For a crossing, the triangle on the other side of the given triangle.
  TriangleId partner(TriangleId t) const {
    return edge_triangle(edge_a()) == t ? edge_triangle(edge_b()) : edge_triangle(edge_a());
  }
  /// Edge of this vertex lying on triangle t's boundary (crossings only).
  EdgeId edge_on(TriangleId t) const { return edge_triangle(edge_a()) == t ? edge_a() : edge_b(); }

  std::uint64_t raw() const { return raw_; }
  std::string to_string() const;

  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;

 private:
  explicit VertexRef(std::uint64_t raw) : raw_(raw) {}
  std::uint64_t raw_ = 0;
};

/// Shared edge of two distinct vertices, if any.
std::optional<EdgeId> common_edge(VertexRef a, VertexRef b);

/// One clockwise step along a projected triangle: edge `edge` walked from corner `from` to `to`.
struct BoundarySlot {
  EdgeId edge;
  unsigned from, to;
};

/// Read-only input: a viewpoint and triangles ordered far to near.
///
/// Coordinates are stored exactly as integers; the represented rational value
/// is coordinate / scale(). The projection frame uses integer direction vectors
/// (normal toward the scene, u and w spanning the plane) so that projected
/// corners come out as integer homogeneous points.
class Scene {
 public:
  struct Frame {
    IVec3 normal, u, w;
  };

  /// Builds a scene, choosing the projection normal along the direction from the
  /// viewpoint to the centroid of all triangle vertices. Throws ValidationError
  /// for empty scenes, corners not strictly in front of the viewpoint, or
  /// triangles with zero projected area.
  static Scene from_rational(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles);
  /// Same, but with an explicitly given frame (directions only; magnitudes are free).
  static Scene from_rational(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles,
                             const Frame& frame, std::size_t padding = 0);

  std::size_t size() const { return triangles_.size(); }
  std::size_t padding() const { return padding_; }
  std::size_t original_size() const { return size() - padding_; }
  bool is_padding(TriangleId t) const { return t < padding_; }
  std::size_t num_edges() const { return 3 * size(); }

  const Frame& frame() const { return frame_; }
  const Int& scale() const { return scale_; }
  const IVec3& viewpoint_scaled() const { return viewpoint_; }
  const IVec3& corner_scaled(TriangleId t, unsigned c) const { return triangles_[t][c]; }

  RPoint3 viewpoint() const;
  RPoint3 corner(TriangleId t, unsigned c) const;
  RTriangle3 triangle(TriangleId t) const;
  std::vector<RTriangle3> triangles() const;
  ProjectionFrame projection_frame() const;

  /// Projected corner as an integer homogeneous point.
  HPoint project_corner(TriangleId t, unsigned c) const;
  std::pair<HPoint, HPoint> edge_endpoints(EdgeId e) const;
  Line edge_line(EdgeId e) const;
  /// Resolves an implicit vertex; throws InvariantError ("NoIntersection") when a
  /// crossing's edges are parallel or do not properly cross.
  HPoint resolve(VertexRef v) const;
  /// Resolves without checking that the crossing lies on both segments.
  HPoint resolve_unchecked(VertexRef v) const;

  /// The i-th step (i in 0..2) of the clockwise walk around triangle t's projection,
  /// starting at corner 0.
  BoundarySlot clockwise_slot(TriangleId t, unsigned i) const;
  unsigned clockwise_slot_of_edge(TriangleId t, EdgeId e) const;
  /// True when corners 0, 1, 2 already appear in clockwise order in projection.
  bool is_clockwise(TriangleId t) const { return !ccw_[t]; }

  /// Depth along the viewing ray through the plane point (x, y) to the triangle's
  /// supporting plane; smaller is nearer.
  Rational ray_depth(TriangleId t, const Rational& x, const Rational& y) const;

  /// Plane coordinates converted to an orthonormal basis of the plane at unit
  /// distance from the viewpoint (output only).
  std::pair<double, double> to_plane_coordinates(const HPoint& p) const;
  /// Exact back-projection of a plane point onto triangle t's supporting plane.
  RPoint3 back_project(TriangleId t, const HPoint& p) const;

 private:
  void project_all();

  IVec3 viewpoint_;
  std::vector<std::array<IVec3, 3>> triangles_;
  std::vector<bool> ccw_;
  std::vector<std::array<Int, 3>> projected_;  // per corner, 3t + c
  std::vector<std::array<Int, 3>> lines_;      // per edge
  Frame frame_;
  Int scale_ = 1;
  std::size_t padding_ = 0;
  double u_scale_ = 1, w_scale_ = 1;
};

/// Throws DepthOrderViolation (1-based indices) for the first pair i < j whose
/// projections overlap with triangle i nearer than triangle j.
void validate_depth_order(const Scene& scene);
std::optional<std::pair<std::size_t, std::size_t>> find_depth_violation(const Scene& scene);

/// Throws DegeneracyDetected when projected edges overlap collinearly, a corner
/// lies on another triangle's edge, or three edges pass through one point.
void check_general_position(const Scene& scene);

/// Proper crossings between projected edges of different triangles.
std::vector<VertexRef> all_edge_crossings(const Scene& scene);

struct PaddedScene {
  Scene scene;
  std::size_t added = 0;
};

/// Pads to a power of two by prepending shrunk copies of the farthest triangle,
/// nested inside its projection and pushed behind it along the viewing rays.
PaddedScene pad_to_power_of_two(const Scene& scene);

std::size_t next_power_of_two(std::size_t n);

/// Exact parse of a decimal string such as "-1.25e-3".
Rational parse_decimal(const std::string& text);

}  // namespace hsr

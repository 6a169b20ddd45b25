#include "hsr/scene.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "hsr/errors.hpp"

namespace hsr {

namespace {

Int dot(const IVec3& a, const IVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
IVec3 sub(const IVec3& a, const IVec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
IVec3 cross(const IVec3& a, const IVec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Rational rdot(const RPoint3& a, const RPoint3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
RPoint3 rsub(const RPoint3& a, const RPoint3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

IVec3 reduce(IVec3 v) {
  Int g;
  mpz_gcd(g.get_mpz_t(), v.x.get_mpz_t(), v.y.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.z.get_mpz_t());
  if (g > 1) {
    v.x /= g;
    v.y /= g;
    v.z /= g;
  }
  return v;
}

double norm(const IVec3& v) { return std::sqrt(Rational(dot(v, v)).get_d()); }

Int lcm_denominators(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles) {
  Int l = 1;
  auto fold = [&](const Rational& q) { mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t()); };
  auto fold3 = [&](const RPoint3& p) {
    fold(p.x);
    fold(p.y);
    fold(p.z);
  };
  fold3(viewpoint);
  for (const auto& t : triangles)
    for (const auto& p : t) fold3(p);
  return l;
}

IVec3 scaled(const RPoint3& p, const Int& s) {
  Rational x = p.x * s, y = p.y * s, z = p.z * s;
  return {x.get_num(), y.get_num(), z.get_num()};
}

}  // namespace

std::string VertexRef::to_string() const {
  std::ostringstream os;
  if (is_corner())
    os << "C(" << triangle() + 1 << "," << corner_index() << ")";
  else
    os << "X(" << edge_a() << "," << edge_b() << ")";
  return os.str();
}

std::optional<EdgeId> common_edge(VertexRef a, VertexRef b) {
  auto [a1, a2] = a.edges();
  auto [b1, b2] = b.edges();
  if (a1 == b1 || a1 == b2) return a1;
  if (a2 == b1 || a2 == b2) return a2;
  return std::nullopt;
}

RPoint2 project(const ProjectionFrame& frame, const RPoint3& point) {
  const RPoint3 d = rsub(point, frame.eye);
  if (d == RPoint3{0, 0, 0}) throw DegenerateRay();
  const Rational depth = rdot(d, frame.normal);
  if (sgn(depth) <= 0) throw ValidationError("point is not in front of the viewpoint");
  return {rdot(d, frame.u) / depth, rdot(d, frame.w) / depth};
}

Scene Scene::from_rational(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles) {
  if (triangles.empty()) throw ValidationError("scene has no triangles");
  const Int s = lcm_denominators(viewpoint, triangles);
  const IVec3 eye = scaled(viewpoint, s);
  IVec3 sum{0, 0, 0};
  for (const auto& t : triangles)
    for (const auto& p : t) {
      const IVec3 q = scaled(p, s);
      sum = {sum.x + q.x, sum.y + q.y, sum.z + q.z};
    }
  const Int count = static_cast<unsigned long>(3 * triangles.size());
  IVec3 normal{sum.x - count * eye.x, sum.y - count * eye.y, sum.z - count * eye.z};
  if (normal == IVec3{0, 0, 0}) throw ValidationError("scene centroid coincides with the viewpoint");
  normal = reduce(normal);
  // u: normal crossed with the coordinate axis it is least aligned with.
  const Int ax = abs(normal.x), ay = abs(normal.y), az = abs(normal.z);
  IVec3 axis{0, 0, 0};
  if (ax <= ay && ax <= az)
    axis.x = 1;
  else if (ay <= az)
    axis.y = 1;
  else
    axis.z = 1;
  const IVec3 u = reduce(cross(normal, axis));
  const IVec3 w = reduce(cross(normal, u));
  return from_rational(viewpoint, triangles, Frame{normal, u, w});
}

Scene Scene::from_rational(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles,
                           const Frame& frame, std::size_t padding) {
  if (triangles.empty()) throw ValidationError("scene has no triangles");
  if (sgn(dot(frame.normal, frame.u)) != 0 || sgn(dot(frame.normal, frame.w)) != 0 ||
      sgn(dot(frame.u, frame.w)) != 0)
    throw ValidationError("projection frame is not orthogonal");
  Scene scene;
  scene.scale_ = lcm_denominators(viewpoint, triangles);
  scene.viewpoint_ = scaled(viewpoint, scene.scale_);
  scene.frame_ = frame;
  scene.padding_ = padding;
  scene.triangles_.reserve(triangles.size());
  for (const auto& t : triangles)
    scene.triangles_.push_back({scaled(t[0], scene.scale_), scaled(t[1], scene.scale_),
                                scaled(t[2], scene.scale_)});
  scene.ccw_.assign(triangles.size(), false);
  const double nn = norm(frame.normal);
  scene.u_scale_ = nn / norm(frame.u);
  scene.w_scale_ = nn / norm(frame.w);

  for (TriangleId t = 0; t < scene.size(); ++t) {
    for (unsigned c = 0; c < 3; ++c) {
      if (sgn(dot(sub(scene.triangles_[t][c], scene.viewpoint_), frame.normal)) <= 0)
        throw ValidationError("corner " + std::to_string(c) + " of triangle " + std::to_string(t + 1) +
                              " is not strictly in front of the viewpoint");
    }
  }
  scene.project_all();
  for (TriangleId t = 0; t < scene.size(); ++t) {
    const Orientation o = orientation(scene.project_corner(t, 0), scene.project_corner(t, 1),
                                      scene.project_corner(t, 2));
    if (o == Orientation::collinear)
      throw ValidationError("triangle " + std::to_string(t + 1) + " projects to zero area");
    scene.ccw_[t] = (o == Orientation::left);
  }
  return scene;
}

RPoint3 Scene::viewpoint() const {
  return {ratio(viewpoint_.x, scale_), ratio(viewpoint_.y, scale_), ratio(viewpoint_.z, scale_)};
}

RPoint3 Scene::corner(TriangleId t, unsigned c) const {
  const IVec3& p = triangles_[t][c];
  RPoint3 r{ratio(p.x, scale_), ratio(p.y, scale_), ratio(p.z, scale_)};
  r.x.canonicalize();
  r.y.canonicalize();
  r.z.canonicalize();
  return r;
}

RTriangle3 Scene::triangle(TriangleId t) const { return {corner(t, 0), corner(t, 1), corner(t, 2)}; }

std::vector<RTriangle3> Scene::triangles() const {
  std::vector<RTriangle3> out;
  out.reserve(size());
  for (TriangleId t = 0; t < size(); ++t) out.push_back(triangle(t));
  return out;
}

ProjectionFrame Scene::projection_frame() const {
  auto r = [](const IVec3& v) { return RPoint3{v.x, v.y, v.z}; };
  return {viewpoint(), r(frame_.normal), r(frame_.u), r(frame_.w)};
}

HPoint Scene::project_corner(TriangleId t, unsigned c) const {
  const auto& p = projected_[3 * t + c];
  return HPoint(p[0], p[1], p[2]);
}

std::pair<HPoint, HPoint> Scene::edge_endpoints(EdgeId e) const {
  const TriangleId t = edge_triangle(e);
  const unsigned c = e % 3;
  return {project_corner(t, c), project_corner(t, (c + 1) % 3)};
}

Line Scene::edge_line(EdgeId e) const {
  const auto& l = lines_[e];
  return Line(l[0], l[1], l[2]);
}

void Scene::project_all() {
  // Projected corners and edge lines depend on the input alone, so they are
  // derived once here and treated as part of the read-only input.
  auto reduce3 = [](Int& a, Int& b, Int& c) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g > 1) {
      mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    }
  };
  projected_.resize(3 * size());
  for (TriangleId t = 0; t < size(); ++t) {
    for (unsigned c = 0; c < 3; ++c) {
      const IVec3& p = triangles_[t][c];
      const Int dx = p.x - viewpoint_.x, dy = p.y - viewpoint_.y, dz = p.z - viewpoint_.z;
      auto& out = projected_[3 * t + c];
      out[0] = dx * frame_.u.x + dy * frame_.u.y + dz * frame_.u.z;
      out[1] = dx * frame_.w.x + dy * frame_.w.y + dz * frame_.w.z;
      out[2] = dx * frame_.normal.x + dy * frame_.normal.y + dz * frame_.normal.z;
      reduce3(out[0], out[1], out[2]);
    }
  }
  lines_.resize(num_edges());
  for (EdgeId e = 0; e < num_edges(); ++e) {
    auto [a, b] = edge_endpoints(e);
    const Line l = line_through(a, b);
    lines_[e] = {l.a(), l.b(), l.c()};
    reduce3(lines_[e][0], lines_[e][1], lines_[e][2]);
  }
}

HPoint Scene::resolve_unchecked(VertexRef v) const {
  if (v.is_corner()) return project_corner(v.triangle(), v.corner_index());
  auto p = meet(edge_line(v.edge_a()), edge_line(v.edge_b()));
  if (!p) throw InvariantError("NoIntersection: edges of " + v.to_string() + " are parallel");
  return std::move(*p);
}

HPoint Scene::resolve(VertexRef v) const {
  if (v.is_corner()) return project_corner(v.triangle(), v.corner_index());
  HPoint p = resolve_unchecked(v);
  for (EdgeId e : {v.edge_a(), v.edge_b()}) {
    auto [a, b] = edge_endpoints(e);
    if (!on_segment(a, b, p))
      throw InvariantError("NoIntersection: edges of " + v.to_string() + " do not cross");
  }
  return p;
}

BoundarySlot Scene::clockwise_slot(TriangleId t, unsigned i) const {
  if (!ccw_[t]) return {edge_id(t, i), i, (i + 1) % 3};
  switch (i) {
    case 0:
      return {edge_id(t, 2), 0, 2};
    case 1:
      return {edge_id(t, 1), 2, 1};
    default:
      return {edge_id(t, 0), 1, 0};
  }
}

unsigned Scene::clockwise_slot_of_edge(TriangleId t, EdgeId e) const {
  const unsigned c = e % 3;
  return ccw_[t] ? 2 - c : c;
}

Rational Scene::ray_depth(TriangleId t, const Rational& x, const Rational& y) const {
  const auto& f = frame_;
  const Rational nn = Rational(dot(f.normal, f.normal)), uu = Rational(dot(f.u, f.u)),
                 ww = Rational(dot(f.w, f.w));
  auto comp = [&](const Int& n, const Int& u, const Int& w) -> Rational { return n / nn + x * u / uu + y * w / ww; };
  const Rational dx = comp(f.normal.x, f.u.x, f.w.x), dy = comp(f.normal.y, f.u.y, f.w.y),
                 dz = comp(f.normal.z, f.u.z, f.w.z);
  const auto& tri = triangles_[t];
  const IVec3 nt = cross(sub(tri[1], tri[0]), sub(tri[2], tri[0]));
  const Rational num = Rational(dot(nt, sub(tri[0], viewpoint_)));
  const Rational den = dx * nt.x + dy * nt.y + dz * nt.z;
  if (sgn(den) == 0) throw InvariantError("viewing ray parallel to triangle plane");
  return num / den;
}

std::pair<double, double> Scene::to_plane_coordinates(const HPoint& p) const {
  return {p.dx() * u_scale_, p.dy() * w_scale_};
}

RPoint3 Scene::back_project(TriangleId t, const HPoint& p) const {
  const Rational x = p.rx(), y = p.ry();
  const auto& f = frame_;
  const Rational nn = Rational(dot(f.normal, f.normal)), uu = Rational(dot(f.u, f.u)),
                 ww = Rational(dot(f.w, f.w));
  auto comp = [&](const Int& n, const Int& u, const Int& w) -> Rational { return n / nn + x * u / uu + y * w / ww; };
  const Rational dx = comp(f.normal.x, f.u.x, f.w.x), dy = comp(f.normal.y, f.u.y, f.w.y),
                 dz = comp(f.normal.z, f.u.z, f.w.z);
  const Rational s = ray_depth(t, x, y);
  RPoint3 out{(viewpoint_.x + s * dx) / scale_, (viewpoint_.y + s * dy) / scale_,
              (viewpoint_.z + s * dz) / scale_};
  out.x.canonicalize();
  out.y.canonicalize();
  out.z.canonicalize();
  return out;
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  std::string digits;
  long exponent = 0;
  bool any = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, any = true)
    digits += text[i];
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, any = true) {
      digits += text[i];
      --exponent;
    }
  }
  if (!any) throw ValidationError("malformed number: '" + text + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::size_t used = 0;
    try {
      exponent += std::stol(text.substr(i), &used);
    } catch (const std::exception&) {
      throw ValidationError("malformed exponent: '" + text + "'");
    }
    i += used;
  }
  if (i != text.size()) throw ValidationError("malformed number: '" + text + "'");
  Int mantissa(digits, 10);  // base 0 would read a leading zero as octal
  Int power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent < 0 ? Rational(mantissa, power) : Rational(mantissa * power);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace hsr

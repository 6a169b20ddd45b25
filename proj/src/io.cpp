#include "hsr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsr/errors.hpp"

namespace hsr {

using nlohmann::json;

std::string exact_string(const Rational& q) {
  Int den = q.get_den();
  unsigned twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return q.get_num().get_str() + "/" + q.get_den().get_str();
  const unsigned digits = std::max(twos, fives);
  Int ten_k;
  mpz_ui_pow_ui(ten_k.get_mpz_t(), 10, digits);
  const Int scaled = q.get_num() * ten_k / q.get_den();
  std::string s = Int(abs(scaled)).get_str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  }
  return (sgn(scaled) < 0 ? "-" : "") + s;
}

Rational parse_coordinate(const json& value) {
  if (value.is_number_integer()) return Rational(Int(value.get<long>()));
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d)) throw ValidationError("non-finite coordinate");
    return Rational(d);
  }
  if (!value.is_string()) throw ValidationError("coordinate must be a number or a string");
  const auto text = value.get<std::string>();
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    Rational q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) throw ValidationError("bad coordinate: " + text);
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

json scene_to_json(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles) {
  json j;
  j["viewpoint"] = {exact_string(viewpoint.x), exact_string(viewpoint.y), exact_string(viewpoint.z)};
  json tris = json::array();
  for (const auto& t : triangles) {
    json row = json::array();
    for (const auto& p : t) {
      row.push_back(exact_string(p.x));
      row.push_back(exact_string(p.y));
      row.push_back(exact_string(p.z));
    }
    tris.push_back(std::move(row));
  }
  j["triangles"] = std::move(tris);
  return j;
}

GeneratedScene scene_from_json(const json& j) {
  if (!j.is_object() || !j.contains("viewpoint") || !j.contains("triangles"))
    throw ValidationError("scene needs \"viewpoint\" and \"triangles\"");
  const json& vp = j.at("viewpoint");
  if (!vp.is_array() || vp.size() != 3) throw ValidationError("viewpoint must have 3 coordinates");
  GeneratedScene g;
  g.viewpoint = {parse_coordinate(vp[0]), parse_coordinate(vp[1]), parse_coordinate(vp[2])};
  for (const json& row : j.at("triangles")) {
    if (!row.is_array() || row.size() != 9) throw ValidationError("each triangle needs 9 coordinates");
    RTriangle3 t;
    for (int c = 0; c < 3; ++c)
      t[c] = {parse_coordinate(row[3 * c]), parse_coordinate(row[3 * c + 1]), parse_coordinate(row[3 * c + 2])};
    g.triangles.push_back(std::move(t));
  }
  if (g.triangles.empty()) throw ValidationError("scene has no triangles");
  return g;
}

GeneratedScene read_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return scene_from_json(j);
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

namespace {

json point_json(VertexRef v, const Scene& scene, bool exact) {
  const HPoint p = scene.resolve_unchecked(v);
  if (exact) return {exact_string(p.rx()), exact_string(p.ry())};
  auto [x, y] = scene.to_plane_coordinates(p);
  return {x, y};
}

json cycle_json(const std::vector<VertexRef>& cycle, const Scene& scene, bool exact) {
  json c = json::array();
  for (VertexRef v : cycle) c.push_back(point_json(v, scene, exact));
  return c;
}

}  // namespace

json map_to_json(const VisibilityMap& map, const Scene& scene, bool exact) {
  json tris = json::array();
  for (std::size_t i = 0; i < map.portions.size(); ++i) {
    json visible = json::array();
    for (const Polygon& poly : polygons(map.portions[i], scene)) {
      json holes = json::array();
      for (const auto& h : poly.holes) holes.push_back(cycle_json(h, scene, exact));
      visible.push_back({{"outer", cycle_json(poly.outer, scene, exact)}, {"holes", std::move(holes)}});
    }
    tris.push_back({{"id", i}, {"visible", std::move(visible)}});
  }
  return {{"triangles", std::move(tris)}, {"k", map.k()}};
}

json stats_to_json(const SpaceStats& s) {
  return {{"n", s.n},
          {"levels", s.levels},
          {"U_root_complexity", s.U_root_complexity},
          {"K_with_leaves", s.K_with_leaves},
          {"K_without_leaves", s.K_without_leaves},
          {"catalog_bits", s.catalog_bits},
          {"mask_bits", s.mask_bits},
          {"scratch_bits", s.scratch_bits},
          {"visibility_bits_peak", s.visibility_bits_peak},
          {"overflow_refs", s.overflow_refs},
          {"overflow_refs_total", s.overflow_refs_total},
          {"union_buffer_refs_peak", s.union_buffer_refs_peak},
          {"real_cells_peak", s.real_cells_peak},
          {"live_regions_peak", s.live_regions_peak},
          {"per_level_complexities", s.per_level_complexities}};
}

std::string render_svg(const VisibilityMap& map, const Region& root_union, const Scene& scene) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (TriangleId t = static_cast<TriangleId>(scene.padding()); t < scene.size(); ++t) {
    for (unsigned c = 0; c < 3; ++c) {
      auto [x, y] = scene.to_plane_coordinates(scene.project_corner(t, c));
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-300});
  const double scale = 900.0 / span;  // 5% margin on each side of 1000
  const double ox = 50 + (900 - (x1 - x0) * scale) / 2, oy = 50 + (900 - (y1 - y0) * scale) / 2;

  auto subpath = [&](std::ostringstream& d, const std::vector<VertexRef>& cycle) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      auto [x, y] = scene.to_plane_coordinates(scene.resolve_unchecked(cycle[i]));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%c%.3f %.3f ", i == 0 ? 'M' : 'L', ox + (x - x0) * scale,
                    1000 - (oy + (y - y0) * scale));
      d << buf;
    }
    d << "Z ";
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
      << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < map.portions.size(); ++i) {
    // Golden-angle hues keep neighbouring ids apart.
    const int hue = static_cast<int>((i * 137) % 360);
    for (const Polygon& poly : polygons(map.portions[i], scene)) {
      std::ostringstream d;
      subpath(d, poly.outer);
      for (const auto& h : poly.holes) subpath(d, h);
      std::string path = d.str();
      path.pop_back();
      out << "<path class=\"visible\" data-id=\"" << i << "\" fill=\"hsl(" << hue
          << ",60%,70%)\" fill-rule=\"evenodd\" stroke=\"#333\" stroke-width=\"0.5\" d=\"" << path << "\"/>\n";
    }
  }
  std::ostringstream d;
  for (const Cycle& c : root_union.cycles) subpath(d, c.vertices);
  std::string path = d.str();
  if (!path.empty()) path.pop_back();
  out << "<path class=\"union\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" d=\"" << path << "\"/>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace hsr

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsr/oracle.hpp"
#include "hsr/pipeline.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Exact text of a rational: a plain decimal when the expansion terminates,
/// "p/q" otherwise. parse_coordinate reads both back.
std::string exact_string(const Rational& q);
Rational parse_coordinate(const nlohmann::json& value);

/// Scene file: {"viewpoint": [x,y,z], "triangles": [[x1,y1,z1, ..., z3], ...]},
/// triangles far to near, coordinates as exact strings.
nlohmann::json scene_to_json(const RPoint3& viewpoint, const std::vector<RTriangle3>& triangles);
GeneratedScene scene_from_json(const nlohmann::json& j);

GeneratedScene read_scene(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Visibility map as plane coordinates. With `exact`, coordinates are exact
/// strings instead of doubles. Triangle ids are 0-based input indices.
nlohmann::json map_to_json(const VisibilityMap& map, const Scene& scene, bool exact = false);

nlohmann::json stats_to_json(const SpaceStats& stats);

/// SVG of the visible polygons (one filled path per polygon, holes cut out with
/// the even-odd rule) over the root union outline.
std::string render_svg(const VisibilityMap& map, const Region& root_union, const Scene& scene);

}  // namespace hsr

#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "hsr/pipeline.hpp"
#include "hsr/scene.hpp"

namespace hsr {

/// Outcome of running the pipeline and the brute-force oracle on one scene.
struct VerifyReport {
  bool maps_equal = false;
  /// First input triangle whose visible portion differs, and the area gap there.
  std::optional<std::size_t> first_diff;
  Rational area_discrepancy = 0;
  std::size_t nodes_checked = 0;
  std::size_t node_mismatches = 0;
  std::optional<std::uint32_t> first_bad_node;
  std::size_t crossings = 0;  // pairwise projected-edge crossings of the padded scene
  SpaceStats stats;           // of the pipeline run

  bool clean() const { return maps_equal && node_mismatches == 0; }
  std::string summary() const;
};

/// Pads and validates the scene (throws like run_pipeline), compares the map
/// with trivial_viewshed and every node's reconstruction with naive_union.
VerifyReport verify_scene(const Scene& scene);

}  // namespace hsr

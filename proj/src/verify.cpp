#include "hsr/verify.hpp"

#include <sstream>

#include "hsr/oracle.hpp"
#include "hsr/pipeline.hpp"

namespace hsr {

std::string VerifyReport::summary() const {
  std::ostringstream out;
  out << (maps_equal ? "EQUAL" : "DIFFERENT");
  if (first_diff)
    out << " first differing triangle " << *first_diff << " area discrepancy " << area_discrepancy.get_d();
  out << "; nodes " << nodes_checked << " checked, " << node_mismatches << " mismatched";
  if (first_bad_node) out << " (first at node " << *first_bad_node << ")";
  return out.str();
}

VerifyReport verify_scene(const Scene& scene) {
  const PaddedScene padded = pad_to_power_of_two(scene);
  const Scene& s = padded.scene;
  validate_depth_order(s);
  check_general_position(s);
  const UnionTree tree = UnionTree::build(s);
  VerifyReport r;
  r.stats = tree.stats();
  const VisibilityMap map = compute_visibility(tree, &r.stats);
  const VisibilityMap oracle = trivial_viewshed(s);

  r.crossings = count_edge_crossings(s);
  r.maps_equal = map == oracle;
  if (!r.maps_equal) {
    for (std::size_t i = 0; i < map.portions.size(); ++i) {
      if (map.portions[i] == oracle.portions[i]) continue;
      r.first_diff = i;
      r.area_discrepancy = abs(region_area(map.portions[i], s) - region_area(oracle.portions[i], s));
      break;
    }
  }
  for (std::uint32_t w = 1; w < tree.num_leaves(); ++w) {
    auto [first, count] = tree.triangle_range(w);
    ++r.nodes_checked;
    if (tree.reconstruct(w) != naive_union(s, first, count)) {
      if (!r.first_bad_node) r.first_bad_node = w;
      ++r.node_mismatches;
    }
  }
  return r;
}

}  // namespace hsr

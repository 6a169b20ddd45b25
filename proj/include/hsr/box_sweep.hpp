#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace hsr {

/// Axis-aligned box in floating point, used only as a conservative filter by
/// the validators; every accepted pair is re-tested exactly.
struct Box {
  double xmin, xmax, ymin, ymax;

  Box inflated() const {
    auto pad = [](double a, double b) { return 1e-9 * (std::fabs(a) + std::fabs(b)) + 1e-300; };
    const double px = pad(xmin, xmax), py = pad(ymin, ymax);
    return {xmin - px, xmax + px, ymin - py, ymax + py};
  }
  bool overlaps(const Box& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
};

/// Calls f(i, j) with i < j for every pair of overlapping boxes.
template <class F>
void for_each_overlapping_pair(std::span<const Box> boxes, F&& f) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return boxes[a].xmin < boxes[b].xmin; });
  std::vector<std::size_t> active;
  for (std::size_t idx : order) {
    const Box& b = boxes[idx];
    std::erase_if(active, [&](std::size_t a) { return boxes[a].xmax < b.xmin; });
    for (std::size_t a : active)
      if (boxes[a].overlaps(b)) f(std::min(a, idx), std::max(a, idx));
    active.push_back(idx);
  }
}

}  // namespace hsr

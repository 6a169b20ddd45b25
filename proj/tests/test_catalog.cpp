#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "hsr/catalog.hpp"
#include "hsr/errors.hpp"
#include "plane_scene.hpp"

using namespace hsr;
using namespace hsr::testing;

namespace {

// Vertex numbering of the classic four-triangle example, block by block.
const std::vector<std::vector<int>> kC1 = {{1, 14, 5}, {2, 23, 19}, {3, 20, 8}, {9, 24, 22}};
const std::vector<std::vector<int>> kC2 = {
    {1, 4, 7, 14, 12, 10, 5}, {2, 7, 12, 23, 19, 10, 4}, {3, 20, 13, 11, 8}, {9, 13, 24, 22, 11}};
const std::vector<std::vector<int>> kC3 = {{1, 4, 7, 14, 12, 10, 6, 5},
                                           {2, 7, 12, 16, 18, 23, 21, 19, 17, 15, 10, 4},
                                           {3, 16, 20, 18, 15, 13, 11, 8, 6},
                                           {9, 13, 17, 21, 24, 22, 11}};
const char* kB21 = "1001001 1001100 11001 10110";
const char* kB22 = "1111111 1111111 11111 01111";
const char* kB31 = "10010001 100001010000 101000010 1000110";
const char* kB32 = "11111101 111001010011 101001110 0100111";
const char* kB33 = "11111011 111111101101 011111111 0111111";

// Labels occurring once are corners of their block's triangle; labels occurring
// twice are crossings, given distinct made-up edge pairs.
struct Labels {
  std::map<int, VertexRef> ref;
  std::map<VertexRef, int> label;

  explicit Labels(const std::vector<std::vector<int>>& blocks) {
    std::map<int, std::vector<TriangleId>> where;
    for (TriangleId k = 0; k < blocks.size(); ++k)
      for (int l : blocks[k]) where[l].push_back(k);
    std::map<std::pair<TriangleId, TriangleId>, unsigned> used;
    std::map<TriangleId, unsigned> corners;
    for (const auto& [l, ks] : where) {
      VertexRef v;
      if (ks.size() == 1) {
        v = VertexRef::corner(ks[0], corners[ks[0]]++);
      } else {
        const unsigned i = used[{ks[0], ks[1]}]++;
        v = VertexRef::crossing(3 * ks[0] + i % 3, 3 * ks[1] + i / 3);
      }
      ref[l] = v;
      label[v] = l;
    }
  }

  VertexCatalog catalog(const std::vector<std::vector<int>>& blocks, unsigned level) const {
    std::vector<std::vector<VertexRef>> out;
    for (const auto& b : blocks) {
      out.emplace_back();
      for (int l : b) out.back().push_back(ref.at(l));
    }
    return VertexCatalog::from_blocks(out, level, 12);
  }
};

RankSelectBitVector bits(const char* s) { return RankSelectBitVector(BitVector::from_string(s)); }

NodeMask node_mask(std::uint32_t node, TriangleId first, const char* tris, std::vector<std::size_t> starts,
                   std::size_t catalog_size) {
  NodeMask m;
  m.node = node;
  m.first = first;
  m.triangles = bits(tris);
  m.starts = PackedIntVector::from_range(starts.begin(), starts.end(), bits_for(catalog_size));
  return m;
}

std::size_t position_of(const VertexCatalog& c, const Labels& lab, TriangleId k, int label) {
  return *c.find(k, lab.ref.at(label));
}

// Catalog invariants that need geometry: clockwise order and coincident crossings.
void check_catalog(const VertexCatalog& c, const Scene& s) {
  std::set<VertexRef> corners;
  for (TriangleId k = 0; k < c.num_triangles(); ++k) {
    unsigned prev_slot = 0;
    for (std::size_t q = c.block_begin(k); q < c.block_end(k); ++q) {
      const VertexRef v = c.at(q);
      REQUIRE(c.rel_position(q) == std::pair{k, q - c.block_begin(k)});
      REQUIRE(c.abs_position(k, q - c.block_begin(k)) == q);
      if (v.is_corner()) {
        CHECK(v.triangle() == k);
        CHECK(corners.insert(v).second);
        CHECK_FALSE(c.has_cross(q));
      } else {
        REQUIRE(c.has_cross(q));
        const std::size_t p = c.cross(q);
        CHECK(c.cross(p) == q);
        CHECK(c.at(p) == v);
        CHECK(c.triangle_at(p) == v.partner(k));
      }
      // Slot index never decreases and points within a slot advance along it.
      unsigned slot = 0;
      if (v.is_corner()) {
        while (s.clockwise_slot(k, slot).from != v.corner_index()) ++slot;
      } else {
        slot = s.clockwise_slot_of_edge(k, v.edge_on(k));
      }
      CHECK(slot >= prev_slot);
      if (q > c.block_begin(k) && slot == prev_slot) {
        const BoundarySlot bs = s.clockwise_slot(k, slot);
        CHECK(compare_along(s.project_corner(k, bs.from), s.project_corner(k, bs.to), s.resolve(c.at(q - 1)),
                            s.resolve(v)) > 0);
      }
      prev_slot = slot;
    }
  }
}

}  // namespace

TEST_CASE("leaf level catalog") {
  SUBCASE("one triangle") {
    const Scene s = plane_scene({{{0, 0}, {1, 0}, {0, 1}}});
    const VertexCatalog c = VertexCatalog::leaf_level(s);
    CHECK(c.size() == 3);
    CHECK(c.num_triangles() == 1);
    CHECK(c.block_end(0) == 3);
    CHECK(c.level() == 1);
  }
  SUBCASE("eight random triangles") {
    std::mt19937_64 rng(1);
    const Scene s = plane_scene(random_plane_tris(rng, 8));
    const VertexCatalog c = VertexCatalog::leaf_level(s);
    for (TriangleId k = 0; k < 8; ++k) {
      CHECK(c.count(k) == 3);
      CHECK(c.block_end(k) == 3 * (k + 1));
    }
    check_catalog(c, s);
  }
}

TEST_CASE("absolute and relative positions") {
  const Labels lab(kC1);
  const VertexCatalog c1 = lab.catalog(kC1, 1);
  // Triangle 3, second vertex (1-based) is absolute position 8 (1-based).
  CHECK(c1.abs_position(2, 1) + 1 == 8);
  CHECK(c1.rel_position(0) == std::pair<TriangleId, std::size_t>{0, 0});
  CHECK_THROWS_AS(c1.abs_position(1, 3), std::out_of_range);
  CHECK_THROWS_AS(c1.rel_position(12), std::out_of_range);
  const VertexCatalog c3 = Labels(kC3).catalog(kC3, 3);
  for (std::size_t q = 0; q < c3.size(); ++q) {
    auto [k, r] = c3.rel_position(q);
    CHECK(c3.abs_position(k, r) == q);
  }
}

TEST_CASE("example catalog structure") {
  const Labels lab(kC3);
  const VertexCatalog c3 = lab.catalog(kC3, 3);
  CHECK(c3.size() == 36);
  // Cross pointers pair the two occurrences of every crossing.
  for (std::size_t q = 0; q < c3.size(); ++q) {
    if (!c3.has_cross(q)) continue;
    CHECK(c3.cross(c3.cross(q)) == q);
    CHECK(lab.label.at(c3.at(c3.cross(q))) == lab.label.at(c3.at(q)));
  }
  CHECK(c3.dump_mask(bits(kB32)) ==
        "1, 1, 1, 1, 1, 1, 0, 1| 1, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1, 1| 1, 0, 1, 0, 0, 1, 1, 1, 0| 0, 1, 0, 0, 1, 1, 1");
}

TEST_CASE("masks remap from level 2 to level 3") {
  const Labels lab(kC3);
  const VertexCatalog c2 = lab.catalog(kC2, 2), c3 = lab.catalog(kC3, 3);
  PackedIntVector newpos(c2.size(), bits_for(c3.size()));
  for (std::size_t q = 0; q < c2.size(); ++q) newpos.set(q, *c3.find(c2.triangle_at(q), c2.at(q)));
  CHECK(remap_mask(bits(kB21), newpos, c3.size()).to_bits().words() == BitVector::from_string(kB31).words());
  // Level 2 unions gain no vertices at level 3, so B_{3,2} is B_{2,2} spread out.
  CHECK(remap_mask(bits(kB22), newpos, c3.size()).to_bits().words() == BitVector::from_string(kB32).words());
}

TEST_CASE("walk of the example's right level-2 union") {
  const Labels lab(kC3);
  const VertexCatalog c3 = lab.catalog(kC3, 3);
  const RankSelectBitVector b32 = bits(kB32);
  WalkScratch scratch(4);
  const NodeMask v3 = node_mask(3, 2, "11", {position_of(c3, lab, 2, 3)}, c3.size());
  const auto cycles = walk_union(c3, b32, v3, scratch, nullptr);
  REQUIRE(cycles.size() == 1);
  std::vector<int> seen;
  for (std::size_t q : cycles[0]) seen.push_back(lab.label.at(c3.at(q)));
  CHECK(seen == std::vector<int>{3, 20, 13, 24, 22, 11, 8});

  SUBCASE("without a start pointer the white-triangle search finds the same cycle") {
    const NodeMask bare = node_mask(3, 2, "11", {}, c3.size());
    const auto again = walk_union(c3, b32, bare, scratch, nullptr);
    REQUIRE(again.size() == 1);
    CHECK(again[0] == cycles[0]);
  }
  SUBCASE("colors are restored after use") {
    const auto again = walk_union(c3, b32, v3, scratch, nullptr);
    CHECK(again == cycles);
  }
}

TEST_CASE("example root union has an outer boundary and a hole") {
  const Labels lab(kC3);
  const VertexCatalog c3 = lab.catalog(kC3, 3);
  const RankSelectBitVector b33 = bits(kB33);
  WalkScratch scratch(4);
  const NodeMask v1 =
      node_mask(1, 0, "1111", {position_of(c3, lab, 0, 1), position_of(c3, lab, 2, 13)}, c3.size());
  const auto cycles = walk_union(c3, b33, v1, scratch, nullptr);
  REQUIRE(cycles.size() == 2);
  std::size_t emitted = 0;
  for (const auto& c : cycles)
    for (std::size_t q : c) emitted += c3.has_cross(q) ? 2 : 1;
  CHECK(emitted == b33.count_ones());
}

TEST_CASE("walk errors") {
  const Labels lab(kC3);
  const VertexCatalog c3 = lab.catalog(kC3, 3);
  WalkScratch scratch(4);
  const NodeMask v3 = node_mask(3, 2, "11", {position_of(c3, lab, 2, 3)}, c3.size());
  // A stray bit on corner 9, which the union swallows, cannot be reached consistently.
  BitVector stray = BitVector::from_string(kB32);
  stray.set(position_of(c3, lab, 3, 9));
  CHECK_THROWS_AS(walk_union(c3, RankSelectBitVector(std::move(stray)), v3, scratch, nullptr), InvariantError);
  // Clearing one occurrence of crossing 13 breaks the hand-over between blocks.
  BitVector half = BitVector::from_string(kB32);
  half.set(position_of(c3, lab, 3, 13), false);
  CHECK_THROWS_AS(walk_union(c3, RankSelectBitVector(std::move(half)), v3, scratch, nullptr), NonClosingWalk);
  // The scratch is clean again afterwards.
  CHECK(walk_union(c3, bits(kB32), v3, scratch, nullptr).size() == 1);
}

TEST_CASE("growth on a random scene") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Scene s = plane_scene(random_plane_tris(rng, 6, 3));
    const VertexCatalog c1 = VertexCatalog::leaf_level(s);

    SUBCASE("no new vertices") {
      const CatalogGrowth g = grow_level(c1, {}, s);
      CHECK(g.catalog.dump() == c1.dump());
      CHECK(g.catalog.level() == 2);
      const RankSelectBitVector ones(BitVector(c1.size(), true));
      CHECK(remap_mask(ones, g.newpos, g.catalog.size()).to_bits().words() == ones.to_bits().words());
    }

    // Insert every crossing of the scene, once per incident triangle, split over two steps.
    const auto crossings = all_edge_crossings(s);
    std::vector<std::pair<TriangleId, VertexRef>> first, second;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      auto& dst = i % 2 ? second : first;
      dst.emplace_back(edge_triangle(crossings[i].edge_a()), crossings[i]);
      dst.emplace_back(edge_triangle(crossings[i].edge_b()), crossings[i]);
    }
    const CatalogGrowth g2 = grow_level(c1, first, s);
    check_catalog(g2.catalog, s);
    const CatalogGrowth g3 = grow_level(g2.catalog, second, s);
    check_catalog(g3.catalog, s);
    CHECK(g3.catalog.size() == c1.size() + 2 * crossings.size());
    // Old entries keep their relative order.
    for (std::size_t q = 1; q < g2.catalog.size(); ++q)
      if (g2.catalog.triangle_at(q) == g2.catalog.triangle_at(q - 1)) CHECK(g3.newpos[q - 1] < g3.newpos[q]);
    for (std::size_t q = 0; q < g2.catalog.size(); ++q) CHECK(g3.catalog.at(g3.newpos[q]) == g2.catalog.at(q));

    if (!first.empty()) {
      CHECK_THROWS_AS(grow_level(g2.catalog, {first[0]}, s), DuplicateVertex);
    }
  }
}

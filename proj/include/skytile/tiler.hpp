#pragma once

#include "skytile/region.hpp"

#include <cstdint>

namespace skytile {

// A cell of the boundary arrangement, half-open per dimension and clipped to
// the domain box. Content is the constant query answer on the cell interior,
// restricted to the group whose regions were intersected.
struct Tile {
    AxisBox location;
    std::vector<PointId> content;
    // Generators of planes on the cell's bounding coordinates that are not in
    // the content; candidates to add when a query lies exactly on the bound.
    std::vector<PointId> exception_generators;
};

struct TileSet {
    int dim = 0;
    Coord inf = kDefaultInf;
    std::vector<PointId> group;          // region generators
    std::vector<SkylineRegion> regions;  // one per group member, built vs full D
    std::vector<std::vector<Coord>> boundaries;  // L_i, sorted unique
    std::vector<Tile> tiles;             // grid cells, row-major; empty when too large
    bool materialized = false;

    size_t gap_count(int i) const { return boundaries[static_cast<size_t>(i)].size() + 1; }
    std::uint64_t total_cells() const;

    // Gap index of coordinate x in dimension i under the half-open convention
    // [b_{g-1}, b_g).
    size_t locate_gap(int i, Coord x) const;
    // Gap interval, clipped to [-inf, inf].
    Interval gap_interval(int i, size_t gap) const;
    AxisBox cell_box(std::span<const size_t> gaps) const;
    // Doubled coordinates of the cell center (exact on the half-unit grid).
    std::vector<Coord> cell_center2(std::span<const size_t> gaps) const;
    // Content of a single grid cell, evaluated directly from the regions.
    std::vector<PointId> cell_content(std::span<const size_t> gaps) const;
    // Row-major flat index helpers for the materialized grid.
    size_t flat_index(std::span<const size_t> gaps) const;

    const Tile& tile_at(const Query& q) const;
};

// Intersects the skyline regions of one group into the tiling of the space.
// Materializes the grid cells when their number is at most max_cells.
TileSet build_tiling(std::vector<SkylineRegion> regions, Coord inf = kDefaultInf,
                     std::uint64_t max_cells = std::uint64_t{1} << 22);

// (L_1..L_d, N) with N = max_i |L_i|.
std::pair<const std::vector<std::vector<Coord>>*, size_t> boundary_lists(const TileSet& ts);

// Deterministic seeded partition of the dataset into ceil(n/l) groups of
// size l (last group possibly smaller).
std::vector<std::vector<PointId>> partition_points(const Dataset& D, size_t l,
                                                   std::uint64_t seed);

// Full generalized-tiling pipeline helper: regions for all points (vs full
// D), partitioned into groups of l, one TileSet per group.
std::vector<TileSet> build_group_tilings(const Dataset& D, size_t l, std::uint64_t seed,
                                         Coord inf = kDefaultInf,
                                         std::uint64_t max_cells = std::uint64_t{1} << 22);

// Number of connected components of equal-content cells in a materialized
// tiling; the arrangement-cell count used by the tile-count oracle test.
std::uint64_t merged_tile_count(const TileSet& ts);

}  // namespace skytile

#pragma once

#include "skytile/aggregate.hpp"

#include <cstdint>
#include <string>

namespace skytile {

// Internal node of the bulk-loaded index. The split condition is a chain of
// at most 2d-1 coordinate comparisons: for each dimension t < d-1 the pair
// (lo_t, hi_t) brackets the boundary cell's slab (q[t] < lo_t descends left,
// q[t] >= hi_t descends right, otherwise fall through), and the final
// coordinate decides q[d-1] < c.
struct IndexNode {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t payload = -1;  // leaf content index when left < 0
    std::vector<Coord> chain;

    bool is_leaf() const { return left < 0; }
};

struct SkyIndex {
    int dim = 0;
    Coord inf = kDefaultInf;
    std::int64_t k = 0;
    std::vector<IndexNode> nodes;  // preorder, root at 0
    std::vector<std::vector<PointId>> leaf_contents;  // in plan cell order

    // Boundary tables: every plane coordinate of the group's regions, with
    // the regions anchored there. A query lying exactly on one of these
    // coordinates gets its candidate set corrected by exact region
    // membership, so the half-open cell convention never loses or inflates
    // answers at boundaries.
    std::vector<std::vector<Coord>> side_coords;
    std::vector<std::vector<std::vector<std::int32_t>>> side_regions;
    std::vector<SkylineRegion> regions;  // borders only; planes dropped

    struct Path {
        std::vector<char> decisions;  // 0 = left, 1 = right
        std::int32_t payload = -1;
    };
    Path locate(const Query& q) const;
    int height() const;
    std::pair<int, int> leaf_depth_range() const;
};

// Bulk load: linearize plan cells (already in strip-major order), median
// split on that order. With equalize_depth every root-to-leaf path gets the
// same length by splitting shallow leaves into duplicate-content children.
SkyIndex build_index(const PartitionPlan& plan, const TileSet& ts,
                     bool equalize_depth = false);

// Leaf content plus boundary corrections for on-plane queries.
std::vector<PointId> lookup(const SkyIndex& idx, const Query& q);

// Union of per-index lookups across the generalized-tiling index family.
std::vector<PointId> query_all(std::span<const SkyIndex> idxs, const Query& q);

// Versioned binary serialization (magic "SKYT", little-endian).
struct IndexFileHeader {
    std::uint32_t version = 1;
    std::uint8_t mode = 0;  // 0 plain (encrypted forms carry their own file)
    std::uint8_t padded = 0;
    std::uint16_t dim = 0;
    std::uint64_t l = 0;
    std::int64_t k = 0;
    Coord inf = kDefaultInf;
};

void save_indexes(const std::string& path, const IndexFileHeader& hdr,
                  std::span<const SkyIndex> idxs);
std::pair<IndexFileHeader, std::vector<SkyIndex>> load_indexes(const std::string& path);

std::vector<std::uint8_t> serialize_indexes(const IndexFileHeader& hdr,
                                            std::span<const SkyIndex> idxs);
std::pair<IndexFileHeader, std::vector<SkyIndex>> deserialize_indexes(
    std::span<const std::uint8_t> bytes);

}  // namespace skytile

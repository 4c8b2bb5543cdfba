#pragma once

#include "skytile/tiler.hpp"

#include <cstdint>
#include <limits>

namespace skytile {

struct PlanCell {
    AxisBox box;  // half-open, domain-clipped
    std::vector<PointId> content;
};

// A shape-wise valid partitioning of the query space: vertical cuts span the
// whole domain, horizontal cuts live inside one strip. Cells are ordered
// strip-major, bottom-up; that order drives the index bulk load.
struct PartitionPlan {
    int dim = 0;
    std::int64_t k = 0;
    std::uint64_t cost = 0;  // sum of cell content sizes
    std::vector<Coord> vertical_cuts;
    std::vector<std::vector<Coord>> horizontal_cuts;  // per strip
    std::vector<PlanCell> cells;
};

struct CellCost {
    bool feasible = false;
    std::uint64_t size = 0;      // |union of overlapped tile contents|
    std::uint64_t smallest = 0;  // min overlapped tile content size
};

// Cost of the aggregate cell spanning cut indices [lo_d, hi_d) per dimension
// (cut 0 and cut N_d+1 are the domain edges). Feasible iff
// size <= smallest + k.
CellCost cell_cost(const TileSet& ts, std::span<const size_t> lo_cuts,
                   std::span<const size_t> hi_cuts, std::int64_t k);
// 2-D convenience: x-cuts [s, t), y-cuts [i, j).
CellCost cell_cost(const TileSet& ts, size_t s, size_t i, size_t t, size_t j,
                   std::int64_t k);

// Optimal plan by dynamic programming over boundary cuts (d == 2).
PartitionPlan solve_dp(const TileSet& ts, std::int64_t k);

// DP with forced cuts at every m-th boundary coordinate in both dimensions;
// approaches the DP optimum as m grows.
PartitionPlan solve_prepartition(const TileSet& ts, std::int64_t k, size_t m);

// Single-pass heuristic: place each next cut as far away as feasibility
// allows (d == 2).
PartitionPlan solve_greedy(const TileSet& ts, std::int64_t k);

// No aggregation: one cell per grid cell, with equal-content runs along the
// last dimension merged. Used when d != 2 (k is forced to 0 there) and for
// the plain generalized-tiling pipeline.
PartitionPlan identity_plan(const TileSet& ts);

}  // namespace skytile

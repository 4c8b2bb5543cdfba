#pragma once

#include "skytile/tiler.hpp"

#include <array>
#include <cstdint>

namespace skytile {

// Event-sweep machinery over a 2-D tiling. The aggregation solvers run on
// these tables instead of materialized grid cells, which keeps large tilings
// (whose cell count is quadratic and worse) out of memory.
//
// Cut/gap indexing per dimension: cut 0 sits at -inf, cut c (1..N) at
// L[c-1], cut N+1 at +inf; gap g spans [cut g, cut g+1).
class Sweep2D {
public:
    explicit Sweep2D(const TileSet& tiles);

    struct Event {
        int gen;           // region ordinal
        std::uint32_t lo;  // flip applies to other-dim gaps [lo, hi)
        std::uint32_t hi;
    };

    const TileSet& ts;
    size_t nv = 0;  // |L_0|
    size_t nh = 0;  // |L_1|
    // events[d][c]: membership flips when crossing boundary L_d[c]
    std::array<std::vector<std::vector<Event>>, 2> events;
    // contents of the bottom row of cells (y-gap 0), per x-gap, as sorted
    // region ordinals; propagated once and reused to seed every strip sweep
    std::vector<std::vector<int>> bottom;

    int region_ordinal(PointId gen) const;
    std::vector<int> cell_ordinals(size_t gx, size_t gy) const;

private:
    std::vector<std::pair<PointId, int>> ordinal_by_gen_;
};

struct StripGreedyResult {
    bool feasible = false;
    std::vector<size_t> cuts;  // interior y-cut indices, ascending
    // Bottom-up cells; filled only when cells are collected.
    std::vector<std::vector<int>> cell_ordinals;
    std::uint64_t cost = 0;
};

struct StripRun {
    size_t cut = 0;       // starting y-cut index (0 denotes the bottom edge)
    std::int64_t row_min = 0;  // min subcell content size across the run
    std::vector<int> present;  // region ordinals present within the run
};

// One pass over a strip of x-gaps [ca, cb) between cut indices ca < cb.
class StripSweep {
public:
    StripSweep(const Sweep2D& sweep, size_t ca, size_t cb);

    // Horizontal-only greedy: next cut at the farthest feasible index. Fails
    // only when some single row is itself cardinality-wise invalid, in which
    // case no horizontal-only plan exists for this strip.
    StripGreedyResult greedy_h(std::int64_t k, bool collect_cells);

    // Run records (row segments between consecutive relevant cuts) for the DP.
    std::vector<StripRun> runs();

private:
    struct GenState {
        int uniform = 0;  // +1 present in all columns, -1 absent, 0 mixed
        int count = 0;
        std::vector<std::uint64_t> bits;
    };

    const Sweep2D& sw_;
    size_t ca_, cb_, cols_;
    std::vector<int> active_cuts_;  // y-cut indices with events touching the strip

    std::vector<GenState> state_;
    std::vector<std::int64_t> col_size_;  // base sizes; effective = base + offset
    std::vector<std::int64_t> size_hist_;  // histogram over base + hist_shift_
    std::int64_t hist_shift_ = 0;
    std::int64_t size_offset_ = 0;
    std::int64_t min_base_ = 0;

    std::vector<int> present_list_;  // region ordinals, lazily compacted
    std::vector<char> present_flag_;
    std::vector<char> in_list_;
    std::vector<int> rise_;     // ordinals net-present after the current cut batch
    std::vector<int> touched_;  // ordinals touched by the current cut batch
    std::vector<std::uint32_t> touched_mark_;
    std::uint32_t touch_epoch_ = 0;

    void seed();
    bool is_present(int gen) const;
    void apply_cut(size_t cut_index);
    void apply_event(const Sweep2D::Event& ev);
    void bump_size(size_t col, int delta);
    std::int64_t row_min() const;
    void materialize_bits(GenState& g, bool present_everywhere);
    std::vector<int> live_present();
};

}  // namespace skytile

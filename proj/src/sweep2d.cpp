#include "skytile/sweep2d.hpp"

#include <algorithm>
#include <stdexcept>

namespace skytile {

namespace {

// Gap index of the first gap starting at coordinate c (a boundary coordinate
// or -inf).
std::uint32_t gap_from(const std::vector<Coord>& L, Coord c, Coord inf) {
    if (c <= -inf) return 0;
    const auto it = std::lower_bound(L.begin(), L.end(), c);
    return static_cast<std::uint32_t>(it - L.begin()) + 1;
}

std::uint32_t gap_until(const std::vector<Coord>& L, Coord c, Coord inf) {
    if (c >= inf) return static_cast<std::uint32_t>(L.size()) + 1;
    const auto it = std::lower_bound(L.begin(), L.end(), c);
    return static_cast<std::uint32_t>(it - L.begin()) + 1;
}

}  // namespace

Sweep2D::Sweep2D(const TileSet& tiles) : ts(tiles) {
    if (ts.dim != 2) throw std::invalid_argument("Sweep2D: d must be 2");
    nv = ts.boundaries[0].size();
    nh = ts.boundaries[1].size();
    events[0].assign(nv, {});
    events[1].assign(nh, {});

    ordinal_by_gen_.reserve(ts.regions.size());
    for (size_t r = 0; r < ts.regions.size(); ++r)
        ordinal_by_gen_.emplace_back(ts.regions[r].generator, static_cast<int>(r));
    std::sort(ordinal_by_gen_.begin(), ordinal_by_gen_.end());

    for (size_t r = 0; r < ts.regions.size(); ++r) {
        // Two border pairs of one region can share a plane coordinate; their
        // flip sets are identical (both are computed from the full border
        // set), so the events must be registered once per coordinate.
        std::vector<std::pair<int, Coord>> seen;
        for (const SkylineHyperPlane& h : ts.regions[r].planes) {
            const int d = h.dim;
            const int od = 1 - d;
            if (std::find(seen.begin(), seen.end(), std::make_pair(d, h.coord)) !=
                seen.end())
                continue;
            seen.emplace_back(d, h.coord);
            const auto& L = ts.boundaries[static_cast<size_t>(d)];
            const auto& LO = ts.boundaries[static_cast<size_t>(od)];
            const size_t pos = static_cast<size_t>(
                std::lower_bound(L.begin(), L.end(), h.coord) - L.begin());
            for (const Interval& f : h.flips) {
                Event ev;
                ev.gen = static_cast<int>(r);
                ev.lo = gap_from(LO, f.lo, ts.inf);
                ev.hi = gap_until(LO, f.hi, ts.inf);
                if (ev.lo < ev.hi) events[static_cast<size_t>(d)][pos].push_back(ev);
            }
        }
    }

    // Bottom row, propagated left to right across the vertical boundaries.
    bottom.resize(nv + 1);
    bottom[0] = cell_ordinals(0, 0);
    for (size_t g = 1; g <= nv; ++g) {
        bottom[g] = bottom[g - 1];
        for (const Event& ev : events[0][g - 1]) {
            if (ev.lo > 0) continue;  // flip does not reach the bottom row
            auto it = std::lower_bound(bottom[g].begin(), bottom[g].end(), ev.gen);
            if (it != bottom[g].end() && *it == ev.gen)
                bottom[g].erase(it);
            else
                bottom[g].insert(it, ev.gen);
        }
    }
}

int Sweep2D::region_ordinal(PointId gen) const {
    const auto it = std::lower_bound(ordinal_by_gen_.begin(), ordinal_by_gen_.end(),
                                     std::make_pair(gen, 0));
    if (it == ordinal_by_gen_.end() || it->first != gen)
        throw std::logic_error("Sweep2D: unknown generator");
    return it->second;
}

std::vector<int> Sweep2D::cell_ordinals(size_t gx, size_t gy) const {
    const size_t gaps[2] = {gx, gy};
    const std::vector<Coord> c2 = ts.cell_center2(gaps);
    std::vector<int> out;
    for (size_t r = 0; r < ts.regions.size(); ++r)
        if (ts.regions[r].contains2(c2)) out.push_back(static_cast<int>(r));
    return out;
}

StripSweep::StripSweep(const Sweep2D& sweep, size_t ca, size_t cb)
    : sw_(sweep), ca_(ca), cb_(cb), cols_(cb - ca) {
    if (ca >= cb || cb > sw_.nv + 1) throw std::invalid_argument("StripSweep: bad strip");
    for (size_t c = 0; c < sw_.nh; ++c) {
        for (const Sweep2D::Event& ev : sw_.events[1][c]) {
            if (ev.lo < cb_ && ev.hi > ca_) {
                active_cuts_.push_back(static_cast<int>(c));
                break;
            }
        }
    }
    seed();
}

void StripSweep::seed() {
    state_.assign(sw_.ts.regions.size(), GenState{});
    for (auto& g : state_) g.uniform = -1;
    present_flag_.assign(sw_.ts.regions.size(), 0);
    in_list_.assign(sw_.ts.regions.size(), 0);
    touched_mark_.assign(sw_.ts.regions.size(), 0);
    touch_epoch_ = 0;
    present_list_.clear();
    col_size_.assign(cols_, 0);
    size_offset_ = 0;
    hist_shift_ = 0;
    size_hist_.assign(8, 0);
    size_hist_[0] = static_cast<std::int64_t>(cols_);
    min_base_ = 0;

    for (size_t col = 0; col < cols_; ++col)
        for (int gen : sw_.bottom[ca_ + col]) {
            GenState& g = state_[static_cast<size_t>(gen)];
            if (g.uniform == -1 && g.bits.empty()) {
                g.bits.assign((cols_ + 63) / 64, 0);
                g.uniform = 0;
            }
            g.bits[col >> 6] |= std::uint64_t{1} << (col & 63);
            ++g.count;
            bump_size(col, +1);
            if (!present_flag_[static_cast<size_t>(gen)]) {
                present_flag_[static_cast<size_t>(gen)] = 1;
                in_list_[static_cast<size_t>(gen)] = 1;
                present_list_.push_back(gen);
            }
        }
    for (int gen : present_list_) {
        GenState& g = state_[static_cast<size_t>(gen)];
        if (g.count == static_cast<int>(cols_)) {
            g.uniform = 1;
            g.bits.clear();
        }
    }
}

bool StripSweep::is_present(int gen) const {
    const GenState& g = state_[static_cast<size_t>(gen)];
    if (g.uniform != 0) return g.uniform == 1;
    return g.count > 0;
}

void StripSweep::bump_size(size_t col, int delta) {
    const std::int64_t old = col_size_[col];
    const std::int64_t nw = old + delta;
    col_size_[col] = nw;
    // Base sizes can dip below zero once whole-strip flips have been folded
    // into the offset, so the histogram is indexed with a shift.
    if (nw + hist_shift_ < 0) {
        const std::int64_t grow = 8 - (nw + hist_shift_);
        size_hist_.insert(size_hist_.begin(), static_cast<size_t>(grow), 0);
        hist_shift_ += grow;
    }
    if (static_cast<size_t>(nw + hist_shift_) >= size_hist_.size())
        size_hist_.resize(static_cast<size_t>(nw + hist_shift_) + 8, 0);
    --size_hist_[static_cast<size_t>(old + hist_shift_)];
    ++size_hist_[static_cast<size_t>(nw + hist_shift_)];
    if (nw < min_base_) min_base_ = nw;
    while (size_hist_[static_cast<size_t>(min_base_ + hist_shift_)] == 0) ++min_base_;
}

std::int64_t StripSweep::row_min() const { return min_base_ + size_offset_; }

void StripSweep::materialize_bits(GenState& g, bool present_everywhere) {
    g.bits.assign((cols_ + 63) / 64, present_everywhere ? ~std::uint64_t{0} : 0);
    if (present_everywhere) {
        const size_t rem = cols_ & 63;
        if (rem) g.bits.back() = (std::uint64_t{1} << rem) - 1;
        g.count = static_cast<int>(cols_);
    } else {
        g.count = 0;
    }
    g.uniform = 0;
}

void StripSweep::apply_event(const Sweep2D::Event& ev) {
    if (ev.hi <= ca_ || ev.lo >= cb_) return;
    const size_t lo = std::max<size_t>(ev.lo, ca_) - ca_;
    const size_t hi = std::min<size_t>(ev.hi, cb_) - ca_;
    if (lo >= hi) return;
    GenState& g = state_[static_cast<size_t>(ev.gen)];

    if (lo == 0 && hi == cols_ && g.uniform != 0) {
        // Whole-strip flip of a uniform generator: O(1) via the size offset.
        size_offset_ += g.uniform == 1 ? -1 : +1;
        g.uniform = -g.uniform;
    } else {
        if (g.uniform != 0) materialize_bits(g, g.uniform == 1);
        for (size_t col = lo; col < hi; ++col) {
            const std::uint64_t mask = std::uint64_t{1} << (col & 63);
            if (g.bits[col >> 6] & mask) {
                g.bits[col >> 6] &= ~mask;
                --g.count;
                bump_size(col, -1);
            } else {
                g.bits[col >> 6] |= mask;
                ++g.count;
                bump_size(col, +1);
            }
        }
        if (g.count == 0) {
            g.uniform = -1;
            g.bits.clear();
        } else if (g.count == static_cast<int>(cols_)) {
            g.uniform = 1;
            g.bits.clear();
        }
    }

    const bool now_present = is_present(ev.gen);
    present_flag_[static_cast<size_t>(ev.gen)] = now_present ? 1 : 0;
    if (touched_mark_[static_cast<size_t>(ev.gen)] != touch_epoch_) {
        touched_mark_[static_cast<size_t>(ev.gen)] = touch_epoch_;
        touched_.push_back(ev.gen);
    }
}

void StripSweep::apply_cut(size_t cut_index) {
    // All events at one cut apply simultaneously; only the net state after
    // the batch defines the next run.
    ++touch_epoch_;
    touched_.clear();
    for (const Sweep2D::Event& ev : sw_.events[1][cut_index]) apply_event(ev);
    rise_.clear();
    for (int gen : touched_)
        if (present_flag_[static_cast<size_t>(gen)]) {
            rise_.push_back(gen);
            if (!in_list_[static_cast<size_t>(gen)]) {
                in_list_[static_cast<size_t>(gen)] = 1;
                present_list_.push_back(gen);
            }
        }
}

std::vector<int> StripSweep::live_present() {
    std::vector<int> live;
    for (int gen : present_list_)
        if (present_flag_[static_cast<size_t>(gen)]) live.push_back(gen);
    for (int gen : present_list_)
        if (!present_flag_[static_cast<size_t>(gen)]) in_list_[static_cast<size_t>(gen)] = 0;
    present_list_ = live;
    return present_list_;
}

StripGreedyResult StripSweep::greedy_h(std::int64_t k, bool collect_cells) {
    StripGreedyResult res;
    std::vector<char> in_union(sw_.ts.regions.size(), 0);
    std::vector<int> union_list;
    std::int64_t cell_min = 0;
    auto start_cell = [&]() {
        for (int gen : union_list) in_union[static_cast<size_t>(gen)] = 0;
        union_list.clear();
        for (int gen : live_present()) {
            in_union[static_cast<size_t>(gen)] = 1;
            union_list.push_back(gen);
        }
        cell_min = row_min();
    };
    auto close_cell = [&]() {
        if (collect_cells) {
            std::vector<int> cell(union_list.begin(), union_list.end());
            std::sort(cell.begin(), cell.end());
            res.cell_ordinals.push_back(std::move(cell));
        }
        res.cost += union_list.size();
    };

    start_cell();
    if (static_cast<std::int64_t>(union_list.size()) > cell_min + k) return res;
    for (int cut : active_cuts_) {
        apply_cut(static_cast<size_t>(cut));
        size_t added = 0;
        for (int gen : rise_)
            if (!in_union[static_cast<size_t>(gen)]) {
                in_union[static_cast<size_t>(gen)] = 1;
                union_list.push_back(gen);
                ++added;
            }
        const std::int64_t rm = row_min();
        if (rm < cell_min) cell_min = rm;
        if (static_cast<std::int64_t>(union_list.size()) > cell_min + k) {
            while (added--) {
                in_union[static_cast<size_t>(union_list.back())] = 0;
                union_list.pop_back();
            }
            close_cell();
            res.cuts.push_back(static_cast<size_t>(cut) + 1);
            start_cell();
            if (static_cast<std::int64_t>(union_list.size()) > cell_min + k) return res;
        }
    }
    close_cell();
    res.feasible = true;
    return res;
}

std::vector<StripRun> StripSweep::runs() {
    std::vector<StripRun> out;
    StripRun first;
    first.cut = 0;
    first.row_min = row_min();
    first.present = live_present();
    out.push_back(std::move(first));
    for (int cut : active_cuts_) {
        apply_cut(static_cast<size_t>(cut));
        StripRun run;
        run.cut = static_cast<size_t>(cut) + 1;
        run.row_min = row_min();
        run.present = live_present();
        out.push_back(std::move(run));
    }
    return out;
}

}  // namespace skytile

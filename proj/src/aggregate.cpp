#include "skytile/aggregate.hpp"

#include "skytile/sweep2d.hpp"

#include <algorithm>
#include <stdexcept>

namespace skytile {

namespace {

constexpr std::uint64_t kInfCost = std::numeric_limits<std::uint64_t>::max();

Interval span_interval(const TileSet& ts, int dim, size_t gap_lo, size_t gap_hi) {
    const Interval a = ts.gap_interval(dim, gap_lo);
    const Interval b = ts.gap_interval(dim, gap_hi - 1);
    return Interval{a.lo, b.hi, true, b.hi_closed};
}

std::vector<PointId> ordinals_to_ids(const TileSet& ts, const std::vector<int>& ords) {
    std::vector<PointId> ids;
    ids.reserve(ords.size());
    for (int o : ords) ids.push_back(ts.regions[static_cast<size_t>(o)].generator);
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Shared solver for plain DP (m == 0) and prepartitioning (m >= 1).
PartitionPlan solve_dp_impl(const TileSet& ts, std::int64_t k, size_t m) {
    if (ts.dim != 2) throw std::invalid_argument("solve_dp: d must be 2");
    if (k < 0) throw std::invalid_argument("solve_dp: k must be >= 0");
    Sweep2D sweep(ts);
    const size_t nv = sweep.nv;
    const size_t nh = sweep.nh;

    std::vector<char> forced_v(nv + 2, 0);
    std::vector<char> forced_h_cut(nh + 2, 0);
    if (m >= 1) {
        for (size_t c = m; c <= nv; c += m) forced_v[c] = 1;
        for (size_t c = m; c <= nh; c += m) forced_h_cut[c] = 1;
    }

    std::vector<std::uint32_t> stamp(ts.regions.size(), 0);
    std::uint32_t epoch = 0;

    struct StripOutcome {
        std::uint64_t cost = kInfCost;
        std::vector<size_t> cuts;  // interior y-cut indices
        std::vector<std::vector<int>> cell_ordinals;
    };

    // Horizontal DP over one strip. Positions are the run starts (plus any
    // forced rows and the top edge); cells may not span a forced row.
    auto solve_strip = [&](size_t ca, size_t cb,
                           bool reconstruct) -> StripOutcome {
        StripOutcome out;
        StripSweep ssw(sweep, ca, cb);
        const std::vector<StripRun> runs = ssw.runs();

        std::vector<size_t> pos;  // cut indices, ascending; pos[0] == 0
        for (const StripRun& r : runs) pos.push_back(r.cut);
        if (m >= 1)
            for (size_t c = m; c <= nh; c += m) pos.push_back(c);
        pos.push_back(nh + 1);
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        const size_t P = pos.size() - 1;  // cells live between consecutive positions

        // Run covering cuts [pos[idx], pos[idx + 1]).
        std::vector<size_t> prun(P);
        {
            size_t r = 0;
            for (size_t idx = 0; idx < P; ++idx) {
                while (r + 1 < runs.size() && runs[r + 1].cut <= pos[idx]) ++r;
                prun[idx] = r;
            }
        }
        // First forced position strictly after each position (P when none).
        std::vector<size_t> next_forced(P + 1, P);
        if (m >= 1) {
            size_t nf = P;
            for (size_t idx = P; idx-- > 0;) {
                next_forced[idx] = nf;
                if (pos[idx] >= 1 && pos[idx] <= nh && forced_h_cut[pos[idx]]) nf = idx;
            }
        }

        std::vector<std::uint64_t> H(P + 1, kInfCost);
        std::vector<size_t> choice(P + 1, P + 1);
        H[P] = 0;
        for (size_t s = P; s-- > 0;) {
            ++epoch;
            std::uint64_t usize = 0;
            std::int64_t minv = std::numeric_limits<std::int64_t>::max();
            const size_t tmax = m >= 1 ? next_forced[s] : P;
            for (size_t t = s + 1; t <= P; ++t) {
                const StripRun& run = runs[prun[t - 1]];
                for (int gen : run.present)
                    if (stamp[static_cast<size_t>(gen)] != epoch) {
                        stamp[static_cast<size_t>(gen)] = epoch;
                        ++usize;
                    }
                if (run.row_min < minv) minv = run.row_min;
                if (static_cast<std::int64_t>(usize) > minv + k) break;
                if (t > tmax) break;
                if (H[t] == kInfCost) continue;
                const std::uint64_t c = usize + H[t];
                if (c <= H[s]) {
                    H[s] = c;
                    choice[s] = t;
                }
            }
        }
        out.cost = H[0];
        if (out.cost == kInfCost || !reconstruct) return out;

        for (size_t s = 0; s != P;) {
            const size_t t = choice[s];
            ++epoch;
            std::vector<int> cell;
            for (size_t idx = s; idx < t; ++idx)
                for (int gen : runs[prun[idx]].present)
                    if (stamp[static_cast<size_t>(gen)] != epoch) {
                        stamp[static_cast<size_t>(gen)] = epoch;
                        cell.push_back(gen);
                    }
            std::sort(cell.begin(), cell.end());
            out.cell_ordinals.push_back(std::move(cell));
            if (t != P) out.cuts.push_back(pos[t]);
            s = t;
        }
        return out;
    };

    // Vertical DP. A strip may not span a forced vertical cut, and once a
    // strip is infeasible every wider strip from the same cut is too.
    std::vector<std::uint64_t> V(nv + 2, kInfCost);
    std::vector<size_t> choiceV(nv + 2, 0);
    V[nv + 1] = 0;
    for (size_t i = nv + 1; i-- > 0;) {
        for (size_t j = i + 1; j <= nv + 1; ++j) {
            const StripOutcome so = solve_strip(i, j, false);
            if (so.cost == kInfCost) break;
            if (V[j] != kInfCost) {
                const std::uint64_t c = so.cost + V[j];
                if (c <= V[i]) {
                    V[i] = c;
                    choiceV[i] = j;
                }
            }
            if (m >= 1 && j <= nv && forced_v[j]) break;
        }
        if (V[i] == kInfCost)
            throw std::logic_error("solve_dp: no feasible plan (unreachable for k >= 0)");
    }

    PartitionPlan plan;
    plan.dim = 2;
    plan.k = k;
    plan.cost = V[0];
    for (size_t i = 0; i != nv + 1;) {
        const size_t j = choiceV[i];
        StripOutcome so = solve_strip(i, j, true);
        if (j <= nv) plan.vertical_cuts.push_back(ts.boundaries[0][j - 1]);
        std::vector<Coord> hcuts;
        for (size_t c : so.cuts) hcuts.push_back(ts.boundaries[1][c - 1]);
        const Interval xiv = span_interval(ts, 0, i, j);
        size_t prev_cut = 0;
        for (size_t ci = 0; ci <= so.cuts.size(); ++ci) {
            const size_t cut_hi = ci < so.cuts.size() ? so.cuts[ci] : nh + 1;
            PlanCell cell;
            cell.box.dims = {xiv, span_interval(ts, 1, prev_cut, cut_hi)};
            cell.content = ordinals_to_ids(ts, so.cell_ordinals[ci]);
            plan.cells.push_back(std::move(cell));
            prev_cut = cut_hi;
        }
        plan.horizontal_cuts.push_back(std::move(hcuts));
        i = j;
    }
    return plan;
}

}  // namespace

CellCost cell_cost(const TileSet& ts, std::span<const size_t> lo_cuts,
                   std::span<const size_t> hi_cuts, std::int64_t k) {
    const int d = ts.dim;
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) {
        if (lo_cuts[static_cast<size_t>(i)] >= hi_cuts[static_cast<size_t>(i)] ||
            hi_cuts[static_cast<size_t>(i)] > ts.boundaries[static_cast<size_t>(i)].size() + 1)
            throw std::invalid_argument("cell_cost: bad cut indices");
        total *= hi_cuts[static_cast<size_t>(i)] - lo_cuts[static_cast<size_t>(i)];
        if (total > (std::uint64_t{1} << 22))
            throw std::invalid_argument("cell_cost: cell too large to enumerate");
    }
    std::vector<size_t> gaps(lo_cuts.begin(), lo_cuts.end());
    std::vector<char> seen(ts.regions.size(), 0);
    CellCost out;
    out.smallest = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t it = 0; it < total; ++it) {
        std::uint64_t sz = 0;
        const std::vector<Coord> c2 = ts.cell_center2(gaps);
        for (size_t r = 0; r < ts.regions.size(); ++r)
            if (ts.regions[r].contains2(c2)) {
                ++sz;
                if (!seen[r]) {
                    seen[r] = 1;
                    ++out.size;
                }
            }
        if (sz < out.smallest) out.smallest = sz;
        for (int i = d - 1; i >= 0; --i) {
            if (++gaps[static_cast<size_t>(i)] < hi_cuts[static_cast<size_t>(i)]) break;
            gaps[static_cast<size_t>(i)] = lo_cuts[static_cast<size_t>(i)];
        }
    }
    out.feasible = out.size <= out.smallest + static_cast<std::uint64_t>(k);
    return out;
}

CellCost cell_cost(const TileSet& ts, size_t s, size_t i, size_t t, size_t j,
                   std::int64_t k) {
    if (ts.dim != 2) throw std::invalid_argument("cell_cost(s,i,t,j): d must be 2");
    const size_t lo[2] = {s, i};
    const size_t hi[2] = {t, j};
    return cell_cost(ts, lo, hi, k);
}

PartitionPlan solve_dp(const TileSet& ts, std::int64_t k) { return solve_dp_impl(ts, k, 0); }

PartitionPlan solve_prepartition(const TileSet& ts, std::int64_t k, size_t m) {
    if (m < 1) throw std::invalid_argument("solve_prepartition: m must be >= 1");
    return solve_dp_impl(ts, k, m);
}

PartitionPlan solve_greedy(const TileSet& ts, std::int64_t k) {
    if (ts.dim != 2) throw std::invalid_argument("solve_greedy: d must be 2");
    if (k < 0) throw std::invalid_argument("solve_greedy: k must be >= 0");
    Sweep2D sweep(ts);
    const size_t nv = sweep.nv;

    auto feasible = [&](size_t a, size_t b) {
        return StripSweep(sweep, a, b).greedy_h(k, false).feasible;
    };

    PartitionPlan plan;
    plan.dim = 2;
    plan.k = k;
    size_t ci = 0;
    while (ci < nv + 1) {
        // Farthest feasible next cut: exponential probe, then binary search.
        size_t good = ci + 1;
        size_t step = 1;
        while (good + step <= nv + 1 && feasible(ci, good + step)) {
            good += step;
            step *= 2;
        }
        size_t bad = std::min(good + step, nv + 2);
        while (good + 1 < bad) {
            const size_t mid = good + (bad - good) / 2;
            if (mid <= nv + 1 && feasible(ci, mid))
                good = mid;
            else
                bad = mid;
        }
        const size_t cj = good;
        StripGreedyResult res = StripSweep(sweep, ci, cj).greedy_h(k, true);
        if (!res.feasible) throw std::logic_error("solve_greedy: probe/pass disagree");
        if (cj <= nv) plan.vertical_cuts.push_back(ts.boundaries[0][cj - 1]);
        std::vector<Coord> hcuts;
        for (size_t c : res.cuts) hcuts.push_back(ts.boundaries[1][c - 1]);
        const Interval xiv = span_interval(ts, 0, ci, cj);
        size_t prev_cut = 0;
        for (size_t cidx = 0; cidx < res.cell_ordinals.size(); ++cidx) {
            const size_t cut_hi = cidx < res.cuts.size() ? res.cuts[cidx] : sweep.nh + 1;
            PlanCell cell;
            cell.box.dims = {xiv, span_interval(ts, 1, prev_cut, cut_hi)};
            cell.content = ordinals_to_ids(ts, res.cell_ordinals[cidx]);
            plan.cost += cell.content.size();
            plan.cells.push_back(std::move(cell));
            prev_cut = cut_hi;
        }
        plan.horizontal_cuts.push_back(std::move(hcuts));
        ci = cj;
    }
    return plan;
}

PartitionPlan identity_plan(const TileSet& ts) {
    if (!ts.materialized)
        throw std::logic_error("identity_plan: tiling too large; use an aggregating solver");
    PartitionPlan plan;
    plan.dim = ts.dim;
    plan.k = 0;
    const int d = ts.dim;
    const int last = d - 1;
    if (d >= 2) plan.vertical_cuts = ts.boundaries[0];
    std::vector<size_t> gaps(static_cast<size_t>(d), 0);
    const size_t last_gaps = ts.gap_count(last);
    bool done = ts.tiles.empty();
    while (!done) {
        // Merge equal-content runs along the last dimension.
        size_t run_start = 0;
        const size_t base = ts.flat_index(gaps);
        for (size_t g = 1; g <= last_gaps; ++g) {
            if (g < last_gaps && ts.tiles[base + g].content == ts.tiles[base + run_start].content)
                continue;
            PlanCell cell;
            cell.box.dims.resize(static_cast<size_t>(d));
            for (int i = 0; i < last; ++i)
                cell.box.dims[static_cast<size_t>(i)] =
                    ts.gap_interval(i, gaps[static_cast<size_t>(i)]);
            cell.box.dims[static_cast<size_t>(last)] = span_interval(ts, last, run_start, g);
            cell.content = ts.tiles[base + run_start].content;
            plan.cost += cell.content.size();
            plan.cells.push_back(std::move(cell));
            run_start = g;
        }
        done = true;
        for (int i = last - 1; i >= 0; --i) {
            if (++gaps[static_cast<size_t>(i)] < ts.gap_count(i)) {
                done = false;
                break;
            }
            gaps[static_cast<size_t>(i)] = 0;
        }
        if (d == 1) done = true;
    }
    if (d == 2) {
        // horizontal cut lists per strip: the retained run boundaries
        plan.horizontal_cuts.assign(ts.gap_count(0), {});
        size_t cell_idx = 0;
        for (size_t strip = 0; strip < ts.gap_count(0); ++strip) {
            while (cell_idx < plan.cells.size()) {
                const PlanCell& c = plan.cells[cell_idx];
                if (c.box.dims[0].lo != ts.gap_interval(0, strip).lo) break;
                if (c.box.dims[1].hi < ts.inf)
                    plan.horizontal_cuts[strip].push_back(c.box.dims[1].hi);
                ++cell_idx;
            }
        }
    }
    if (ts.dim == 1) {
        plan.vertical_cuts.clear();
        for (const PlanCell& c : plan.cells)
            if (c.box.dims[0].hi < ts.inf) plan.vertical_cuts.push_back(c.box.dims[0].hi);
    }
    return plan;
}

}  // namespace skytile

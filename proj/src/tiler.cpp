#include "skytile/tiler.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace skytile {

std::uint64_t TileSet::total_cells() const {
    std::uint64_t total = 1;
    for (int i = 0; i < dim; ++i) {
        const std::uint64_t g = gap_count(i);
        if (total > (std::uint64_t{1} << 62) / g) return std::uint64_t{1} << 62;
        total *= g;
    }
    return total;
}

size_t TileSet::locate_gap(int i, Coord x) const {
    const auto& L = boundaries[static_cast<size_t>(i)];
    return static_cast<size_t>(std::upper_bound(L.begin(), L.end(), x) - L.begin());
}

Interval TileSet::gap_interval(int i, size_t gap) const {
    const auto& L = boundaries[static_cast<size_t>(i)];
    const Coord lo = gap == 0 ? -inf : L[gap - 1];
    const Coord hi = gap == L.size() ? inf : L[gap];
    // Last gap closes at the domain bound so the cells cover the whole box.
    return Interval{lo, hi, true, gap == L.size()};
}

AxisBox TileSet::cell_box(std::span<const size_t> gaps) const {
    AxisBox box;
    box.dims.resize(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i)
        box.dims[static_cast<size_t>(i)] = gap_interval(i, gaps[static_cast<size_t>(i)]);
    return box;
}

std::vector<Coord> TileSet::cell_center2(std::span<const size_t> gaps) const {
    std::vector<Coord> c2(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const Interval iv = gap_interval(i, gaps[static_cast<size_t>(i)]);
        c2[static_cast<size_t>(i)] = iv.lo + iv.hi;
    }
    return c2;
}

std::vector<PointId> TileSet::cell_content(std::span<const size_t> gaps) const {
    const std::vector<Coord> c2 = cell_center2(gaps);
    std::vector<PointId> out;
    for (size_t r = 0; r < regions.size(); ++r)
        if (regions[r].contains2(c2)) out.push_back(regions[r].generator);
    std::sort(out.begin(), out.end());
    return out;
}

size_t TileSet::flat_index(std::span<const size_t> gaps) const {
    size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * gap_count(i) + gaps[static_cast<size_t>(i)];
    return idx;
}

const Tile& TileSet::tile_at(const Query& q) const {
    if (!materialized) throw std::logic_error("tile_at: tiling not materialized");
    std::vector<size_t> gaps(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) gaps[static_cast<size_t>(i)] = locate_gap(i, q[i]);
    return tiles[flat_index(gaps)];
}

namespace {

void toggle(std::vector<PointId>& content, PointId id, bool present) {
    auto it = std::lower_bound(content.begin(), content.end(), id);
    const bool was = it != content.end() && *it == id;
    if (present && !was)
        content.insert(it, id);
    else if (!present && was)
        content.erase(it);
}

}  // namespace

TileSet build_tiling(std::vector<SkylineRegion> regions, Coord inf,
                     std::uint64_t max_cells) {
    if (regions.empty()) throw std::invalid_argument("build_tiling: no regions");
    TileSet ts;
    ts.dim = regions.front().dim;
    ts.inf = inf;
    ts.regions = std::move(regions);
    for (const auto& r : ts.regions) {
        if (r.dim != ts.dim) throw std::invalid_argument("build_tiling: mixed dimensions");
        ts.group.push_back(r.generator);
    }
    std::sort(ts.group.begin(), ts.group.end());

    ts.boundaries.assign(static_cast<size_t>(ts.dim), {});
    for (const auto& r : ts.regions)
        for (const auto& h : r.planes)
            ts.boundaries[static_cast<size_t>(h.dim)].push_back(h.coord);
    for (auto& L : ts.boundaries) {
        std::sort(L.begin(), L.end());
        L.erase(std::unique(L.begin(), L.end()), L.end());
    }

    if (ts.total_cells() > max_cells) return ts;

    // Region ordinals with a plane at each boundary coordinate: the only
    // membership that can change across that coordinate.
    std::vector<std::vector<std::vector<int>>> cands(static_cast<size_t>(ts.dim));
    for (int i = 0; i < ts.dim; ++i)
        cands[static_cast<size_t>(i)].assign(ts.boundaries[static_cast<size_t>(i)].size(), {});
    for (size_t r = 0; r < ts.regions.size(); ++r)
        for (const auto& h : ts.regions[r].planes) {
            const auto& L = ts.boundaries[static_cast<size_t>(h.dim)];
            const size_t pos = static_cast<size_t>(
                std::lower_bound(L.begin(), L.end(), h.coord) - L.begin());
            auto& lst = cands[static_cast<size_t>(h.dim)][pos];
            if (lst.empty() || lst.back() != static_cast<int>(r))
                lst.push_back(static_cast<int>(r));
        }

    const size_t total = ts.total_cells();
    ts.tiles.resize(total);
    std::vector<size_t> gaps(static_cast<size_t>(ts.dim), 0);
    std::vector<size_t> strides(static_cast<size_t>(ts.dim), 1);
    for (int i = ts.dim - 2; i >= 0; --i)
        strides[static_cast<size_t>(i)] =
            strides[static_cast<size_t>(i + 1)] * ts.gap_count(i + 1);

    for (size_t idx = 0; idx < total; ++idx) {
        Tile& t = ts.tiles[idx];
        t.location = ts.cell_box(gaps);
        if (idx == 0) {
            t.content = ts.cell_content(gaps);
        } else {
            // Propagate from the neighbor across the last incremented dim;
            // only generators with a plane at the crossed coordinate flip.
            int j = ts.dim - 1;
            while (gaps[static_cast<size_t>(j)] == 0) --j;
            const size_t neighbor = idx - strides[static_cast<size_t>(j)];
            t.content = ts.tiles[neighbor].content;
            const size_t coord_pos = gaps[static_cast<size_t>(j)] - 1;
            const std::vector<Coord> c2 = ts.cell_center2(gaps);
            for (int r : cands[static_cast<size_t>(j)][coord_pos])
                toggle(t.content, ts.regions[static_cast<size_t>(r)].generator,
                       ts.regions[static_cast<size_t>(r)].contains2(c2));
        }
        // odometer increment
        for (int i = ts.dim - 1; i >= 0; --i) {
            if (++gaps[static_cast<size_t>(i)] < ts.gap_count(i)) break;
            gaps[static_cast<size_t>(i)] = 0;
        }
    }

    // Exception generators: planes on the cell's bounding coordinates whose
    // generator is absent from the content.
    gaps.assign(static_cast<size_t>(ts.dim), 0);
    for (size_t idx = 0; idx < total; ++idx) {
        Tile& t = ts.tiles[idx];
        for (int i = 0; i < ts.dim; ++i) {
            const size_t g = gaps[static_cast<size_t>(i)];
            for (size_t side = 0; side < 2; ++side) {
                if (side == 0 && g == 0) continue;
                if (side == 1 && g == ts.gap_count(i) - 1) continue;
                const size_t pos = side == 0 ? g - 1 : g;
                for (int r : cands[static_cast<size_t>(i)][pos]) {
                    const PointId gen = ts.regions[static_cast<size_t>(r)].generator;
                    if (!std::binary_search(t.content.begin(), t.content.end(), gen))
                        t.exception_generators.push_back(gen);
                }
            }
        }
        std::sort(t.exception_generators.begin(), t.exception_generators.end());
        t.exception_generators.erase(
            std::unique(t.exception_generators.begin(), t.exception_generators.end()),
            t.exception_generators.end());
        for (int i = ts.dim - 1; i >= 0; --i) {
            if (++gaps[static_cast<size_t>(i)] < ts.gap_count(i)) break;
            gaps[static_cast<size_t>(i)] = 0;
        }
    }
    ts.materialized = true;
    return ts;
}

std::pair<const std::vector<std::vector<Coord>>*, size_t> boundary_lists(const TileSet& ts) {
    size_t n = 0;
    for (const auto& L : ts.boundaries) n = std::max(n, L.size());
    return {&ts.boundaries, n};
}

std::vector<std::vector<PointId>> partition_points(const Dataset& D, size_t l,
                                                   std::uint64_t seed) {
    if (l == 0) throw std::invalid_argument("partition_points: l must be positive");
    if (l > D.size()) throw std::invalid_argument("partition_points: l exceeds n");
    std::vector<PointId> ids(D.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::vector<PointId>> groups;
    for (size_t start = 0; start < ids.size(); start += l) {
        const size_t end = std::min(ids.size(), start + l);
        groups.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(start),
                            ids.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(groups.back().begin(), groups.back().end());
    }
    return groups;
}

std::vector<TileSet> build_group_tilings(const Dataset& D, size_t l, std::uint64_t seed,
                                         Coord inf, std::uint64_t max_cells) {
    const auto groups = partition_points(D, l, seed);
    std::vector<TileSet> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        std::vector<SkylineRegion> regions;
        regions.reserve(g.size());
        for (PointId id : g) regions.push_back(skyline_region(D, id, inf));
        out.push_back(build_tiling(std::move(regions), inf, max_cells));
    }
    return out;
}

std::uint64_t merged_tile_count(const TileSet& ts) {
    if (!ts.materialized) throw std::logic_error("merged_tile_count: not materialized");
    const size_t total = ts.tiles.size();
    std::vector<size_t> parent(total);
    std::iota(parent.begin(), parent.end(), size_t{0});
    auto find = [&](size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<size_t> strides(static_cast<size_t>(ts.dim), 1);
    for (int i = ts.dim - 2; i >= 0; --i)
        strides[static_cast<size_t>(i)] =
            strides[static_cast<size_t>(i + 1)] * ts.gap_count(i + 1);
    std::vector<size_t> gaps(static_cast<size_t>(ts.dim), 0);
    for (size_t idx = 0; idx < total; ++idx) {
        for (int i = 0; i < ts.dim; ++i) {
            if (gaps[static_cast<size_t>(i)] == 0) continue;
            const size_t nb = idx - strides[static_cast<size_t>(i)];
            if (ts.tiles[idx].content == ts.tiles[nb].content) {
                const size_t a = find(idx), b = find(nb);
                if (a != b) parent[a] = b;
            }
        }
        for (int i = ts.dim - 1; i >= 0; --i) {
            if (++gaps[static_cast<size_t>(i)] < ts.gap_count(i)) break;
            gaps[static_cast<size_t>(i)] = 0;
        }
    }
    std::uint64_t roots = 0;
    for (size_t i = 0; i < total; ++i)
        if (find(i) == i) ++roots;
    return roots;
}

}  // namespace skytile

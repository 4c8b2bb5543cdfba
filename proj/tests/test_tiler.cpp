#include "skytile/tiler.hpp"

#include "skytile/sweep2d.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>

using namespace skytile;
using namespace skytile::testutil;

namespace {

std::vector<SkylineRegion> regions_for(const Dataset& D, const std::vector<PointId>& ids) {
    std::vector<SkylineRegion> rs;
    for (PointId id : ids) rs.push_back(skyline_region(D, id));
    return rs;
}

std::vector<SkylineRegion> regions_all(const Dataset& D) {
    std::vector<PointId> ids(D.size());
    for (size_t i = 0; i < D.size(); ++i) ids[i] = static_cast<PointId>(i);
    return regions_for(D, ids);
}

bool on_any_boundary(const TileSet& ts, const Query& q) {
    for (int i = 0; i < ts.dim; ++i) {
        const auto& L = ts.boundaries[static_cast<size_t>(i)];
        if (std::binary_search(L.begin(), L.end(), q[i])) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("build_tiling: singleton dataset gives one full tile") {
    const Dataset D = make_dataset("s", 2, {{5, 5}});
    const TileSet ts = build_tiling(regions_all(D));
    REQUIRE(ts.tiles.size() == 1);
    CHECK(ts.tiles[0].content == std::vector<PointId>{0});
    const auto [L, N] = boundary_lists(ts);
    CHECK(N == 0);
    CHECK((*L)[0].empty());
}

TEST_CASE("build_tiling: 1-D pair splits at the midpoint with an exception generator") {
    const Dataset D = make_dataset("p", 1, {{0}, {4}});
    const TileSet ts = build_tiling(regions_all(D));
    REQUIRE(ts.tiles.size() == 2);
    CHECK(ts.tiles[0].content == std::vector<PointId>{0});
    CHECK(ts.tiles[1].content == std::vector<PointId>{1});
    CHECK(ts.tiles[1].location.dims[0].lo == 4);  // q = 2 in original units
    CHECK(ts.tiles[1].exception_generators == std::vector<PointId>{0});
    const auto [L, N] = boundary_lists(ts);
    CHECK((*L)[0] == std::vector<Coord>{4});
    CHECK(N == 1);
    for (Coord x = -10; x <= 10; ++x) {
        const Query q = qh({2 * x + 1});
        CHECK(ts.tile_at(q).content == ref_skyline(D, q));
    }
}

TEST_CASE("tile contents equal oracle answers at interior queries (full tiling)") {
    std::mt19937_64 rng(43);
    for (int iter = 0; iter < 6; ++iter) {
        const Dataset D = rand_dataset(rng, 6, 2, 40);
        const TileSet ts = build_tiling(regions_all(D));
        int checked = 0;
        for (int j = 0; checked < 1600 && j < 4000; ++j) {
            const Query q = rand_query(rng, 2, 40);
            if (on_any_boundary(ts, q)) continue;
            ++checked;
            CHECK(ts.tile_at(q).content == ref_skyline(D, q));
        }
        CHECK(checked >= 1000);
    }
}

TEST_CASE("tiles partition the bounded domain") {
    std::mt19937_64 rng(47);
    const Dataset D = rand_dataset(rng, 8, 2, 30);
    const TileSet ts = build_tiling(regions_all(D));
    for (int j = 0; j < 2000; ++j) {
        const Query q = rand_query(rng, 2, 30);
        size_t covering = 0;
        for (const Tile& t : ts.tiles)
            if (t.location.contains(q)) ++covering;
        CHECK(covering == 1);
        CHECK(ts.tile_at(q).location.contains(q));
    }
}

TEST_CASE("3-D tilings agree with the oracle at interior queries") {
    std::mt19937_64 rng(49);
    const Dataset D = rand_dataset(rng, 5, 3, 12);
    const TileSet ts = build_tiling(regions_all(D));
    int checked = 0;
    for (int j = 0; checked < 500 && j < 5000; ++j) {
        const Query q = rand_query(rng, 3, 12);
        if (on_any_boundary(ts, q)) continue;
        ++checked;
        CHECK(ts.tile_at(q).content == ref_skyline(D, q));
    }
    CHECK(checked >= 300);
}

TEST_CASE("Property 3: facet crossings toggle exactly the flipping generators") {
    std::mt19937_64 rng(53);
    for (int iter = 0; iter < 4; ++iter) {
        const Dataset D = rand_dataset(rng, 7, 2, 50);
        const TileSet ts = build_tiling(regions_all(D));
        const Sweep2D sweep(ts);
        const size_t gx = ts.gap_count(0), gy = ts.gap_count(1);
        for (size_t x = 0; x < gx; ++x)
            for (size_t y = 0; y < gy; ++y) {
                const size_t gaps[2] = {x, y};
                const size_t idx = ts.flat_index(gaps);
                for (int dimn = 0; dimn < 2; ++dimn) {
                    if (gaps[static_cast<size_t>(dimn)] == 0) continue;
                    const size_t ngaps[2] = {dimn == 0 ? x - 1 : x, dimn == 1 ? y - 1 : y};
                    const Tile& cur = ts.tiles[idx];
                    const Tile& prev = ts.tiles[ts.flat_index(ngaps)];
                    std::vector<PointId> sym;
                    std::set_symmetric_difference(cur.content.begin(), cur.content.end(),
                                                  prev.content.begin(), prev.content.end(),
                                                  std::back_inserter(sym));
                    std::vector<PointId> expect;
                    const size_t other_gap = gaps[static_cast<size_t>(1 - dimn)];
                    const size_t cpos = gaps[static_cast<size_t>(dimn)] - 1;
                    for (const Sweep2D::Event& ev :
                         sweep.events[static_cast<size_t>(dimn)][cpos])
                        if (ev.lo <= other_gap && other_gap < ev.hi)
                            expect.push_back(
                                ts.regions[static_cast<size_t>(ev.gen)].generator);
                    std::sort(expect.begin(), expect.end());
                    expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
                    CHECK(sym == expect);
                }
            }
    }
}

TEST_CASE("merged tile count equals the oracle's distinct-answer cell count") {
    std::mt19937_64 rng(59);
    for (int iter = 0; iter < 4; ++iter) {
        // even original units keep every gap at least two half-units wide, so
        // each cell has a strictly interior half-unit witness for the oracle
        std::uniform_int_distribution<Coord> u(0, 20);
        std::vector<std::vector<Coord>> raw(6, std::vector<Coord>(2));
        for (auto& row : raw)
            for (auto& c : row) c = 2 * u(rng);
        const Dataset D = make_dataset("even", 2, raw);
        const TileSet ts = build_tiling(regions_all(D));

        std::vector<std::vector<PointId>> oracle_contents(ts.tiles.size());
        std::vector<size_t> gaps(2, 0);
        for (size_t i = 0; i < ts.tiles.size(); ++i) {
            std::vector<Coord> w(2);
            for (int dimn = 0; dimn < 2; ++dimn) {
                const Interval iv = ts.gap_interval(dimn, gaps[static_cast<size_t>(dimn)]);
                w[static_cast<size_t>(dimn)] = iv.lo + (iv.hi - iv.lo) / 2;
                if (w[static_cast<size_t>(dimn)] == iv.lo) ++w[static_cast<size_t>(dimn)];
            }
            oracle_contents[i] = ref_skyline(D, Query{w});
            CHECK(oracle_contents[i] == ts.tiles[i].content);
            for (int dimn = 1; dimn >= 0; --dimn) {
                if (++gaps[static_cast<size_t>(dimn)] < ts.gap_count(dimn)) break;
                gaps[static_cast<size_t>(dimn)] = 0;
            }
        }
        const size_t gy = ts.gap_count(1);
        std::vector<size_t> parent(ts.tiles.size());
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        std::function<size_t(size_t)> find = [&](size_t v) -> size_t {
            return parent[v] == v ? v : parent[v] = find(parent[v]);
        };
        for (size_t x = 0; x < ts.gap_count(0); ++x)
            for (size_t y = 0; y < gy; ++y) {
                const size_t i = x * gy + y;
                if (x > 0 && oracle_contents[i] == oracle_contents[i - gy])
                    parent[find(i)] = find(i - gy);
                if (y > 0 && oracle_contents[i] == oracle_contents[i - 1])
                    parent[find(i)] = find(i - 1);
            }
        size_t roots = 0;
        for (size_t i = 0; i < parent.size(); ++i)
            if (find(i) == i) ++roots;
        CHECK(merged_tile_count(ts) == roots);
        CHECK(roots <= ts.tiles.size());
    }
}

TEST_CASE("partition_points: group shapes and determinism") {
    std::mt19937_64 rng(61);
    const Dataset D = rand_dataset(rng, 6, 2, 100);
    const auto g3 = partition_points(D, 3, 9);
    REQUIRE(g3.size() == 2);
    CHECK(g3[0].size() == 3);
    CHECK(g3[1].size() == 3);
    CHECK(partition_points(D, 6, 9).size() == 1);
    CHECK(partition_points(D, 1, 9).size() == 6);
    CHECK(partition_points(D, 4, 9)[1].size() == 2);
    CHECK(partition_points(D, 3, 9) == partition_points(D, 3, 9));
    CHECK_THROWS_AS(partition_points(D, 0, 9), std::invalid_argument);
    CHECK_THROWS_AS(partition_points(D, 7, 9), std::invalid_argument);
}

TEST_CASE("generalized tiling: unions across groups answer exactly") {
    std::mt19937_64 rng(67);
    for (int iter = 0; iter < 3; ++iter) {
        const Dataset D = rand_dataset(rng, 24, 2, 60);
        for (size_t l : {size_t{1}, size_t{5}, size_t{24}}) {
            const auto tilings = build_group_tilings(D, l, 77);
            CHECK(tilings.size() == (D.size() + l - 1) / l);
            int checked = 0;
            for (int j = 0; checked < 400 && j < 2000; ++j) {
                const Query q = rand_query(rng, 2, 60);
                bool skip = false;
                for (const TileSet& ts : tilings)
                    if (on_any_boundary(ts, q)) skip = true;
                if (skip) continue;
                ++checked;
                std::vector<PointId> got;
                for (const TileSet& ts : tilings) {
                    const auto& c = ts.tile_at(q).content;
                    got.insert(got.end(), c.begin(), c.end());
                }
                std::sort(got.begin(), got.end());
                CHECK(got == ref_skyline(D, q));
            }
            CHECK(checked >= 200);
        }
    }
}

TEST_CASE("generalized tiles can be empty when l < n") {
    const Dataset D = make_dataset("far", 2, {{0, 0}, {1, 1}, {100, 100}, {101, 101}});
    const TileSet ts = build_tiling(regions_for(D, {2, 3}));
    bool any_empty = false;
    for (const Tile& t : ts.tiles) any_empty = any_empty || t.content.empty();
    CHECK(any_empty);
}

TEST_CASE("strip sweep reproduces grid contents") {
    std::mt19937_64 rng(71);
    for (int iter = 0; iter < 5; ++iter) {
        const Dataset D = rand_dataset(rng, 8, 2, iter % 2 ? 8 : 80);
        const TileSet ts = build_tiling(regions_all(D));
        const Sweep2D sweep(ts);
        for (size_t g = 0; g <= sweep.nv; ++g) {
            std::vector<PointId> ids;
            for (int o : sweep.bottom[g])
                ids.push_back(ts.regions[static_cast<size_t>(o)].generator);
            std::sort(ids.begin(), ids.end());
            const size_t gaps[2] = {g, 0};
            CHECK(ids == ts.tiles[ts.flat_index(gaps)].content);
        }
        const size_t nv = sweep.nv;
        for (int trial = 0; trial < 8; ++trial) {
            const size_t ca = rng() % (nv + 1);
            const size_t cb = ca + 1 + rng() % (nv + 1 - ca);
            StripSweep ss(sweep, ca, cb);
            const auto runs = ss.runs();
            for (size_t r = 0; r < runs.size(); ++r) {
                const size_t row_gap = runs[r].cut;  // first y-gap of the run
                std::vector<PointId> present;
                std::int64_t mn = std::numeric_limits<std::int64_t>::max();
                for (size_t g = ca; g < cb; ++g) {
                    const size_t gaps[2] = {g, row_gap};
                    const auto& c = ts.tiles[ts.flat_index(gaps)].content;
                    mn = std::min<std::int64_t>(mn, static_cast<std::int64_t>(c.size()));
                    present.insert(present.end(), c.begin(), c.end());
                }
                std::sort(present.begin(), present.end());
                present.erase(std::unique(present.begin(), present.end()), present.end());
                CHECK(runs[r].row_min == mn);
                std::vector<PointId> got;
                for (int o : runs[r].present)
                    got.push_back(ts.regions[static_cast<size_t>(o)].generator);
                std::sort(got.begin(), got.end());
                CHECK(got == present);
            }
        }
    }
}

#include "skytile/oracle.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace skytile;
using namespace skytile::testutil;

namespace {

// Direct restatement of the border elimination rule, used to cross-check the
// bucketed 2-D implementation.
bool shadows_rule(const Point& g, const Point& b, const Point& c) {
    bool differs = false;
    for (int j = 0; j < g.dim(); ++j) {
        if (b[j] == g[j]) continue;
        differs = true;
        if (c[j] == g[j]) return false;
        if ((b[j] > g[j]) != (c[j] > g[j])) return false;
        if (abs_dist(b[j], g[j]) >= abs_dist(c[j], g[j])) return false;
    }
    return differs;
}

std::vector<PointId> borders_naive(const Dataset& D, PointId p) {
    std::vector<PointId> out;
    const Point& g = D[p];
    for (const Point& c : D.points) {
        if (c.id == p || c.coords == g.coords) continue;
        bool dead = false;
        for (const Point& b : D.points) {
            if (b.id == p || b.id == c.id) continue;
            if (shadows_rule(g, b, c)) {
                dead = true;
                break;
            }
        }
        if (!dead) out.push_back(c.id);
    }
    return out;
}

}  // namespace

TEST_CASE("dynamic_skyline: basics") {
    const Dataset single = make_dataset("s", 2, {{1, 1}});
    CHECK(dynamic_skyline(single, qu({9, -3})) == std::vector<PointId>{0});

    const Dataset two = make_dataset("t", 2, {{1, 1}, {2, 2}});
    CHECK(dynamic_skyline(two, qu({0, 0})) == std::vector<PointId>{0});

    const Dataset dup = make_dataset("dup", 2, {{3, 3}, {3, 3}, {9, 9}});
    const auto s = dynamic_skyline(dup, qu({0, 0}));
    CHECK(s == std::vector<PointId>{0, 1});  // duplicates co-occur
}

TEST_CASE("dynamic_skyline matches the independent reference oracle") {
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 40; ++iter) {
        const Dataset D = rand_dataset(rng, 20, 2, 16);
        const Query q = qu({5, 5});
        CHECK(dynamic_skyline(D, q) == ref_skyline(D, q));
        for (int j = 0; j < 10; ++j) {
            const Query r = rand_query(rng, 2, 32);
            CHECK(dynamic_skyline(D, r) == ref_skyline(D, r));
        }
    }
}

TEST_CASE("dynamic_skyline_fast2d agrees with the brute scan, ties included") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 60; ++iter) {
        const Dataset D = rand_dataset(rng, 30, 2, iter % 2 ? 5 : 200);
        for (int j = 0; j < 20; ++j) {
            const Query q = rand_query(rng, 2, iter % 2 ? 5 : 200);
            CHECK(dynamic_skyline_fast2d(D, q) == dynamic_skyline(D, q));
        }
    }
}

TEST_CASE("border_points: basics") {
    const Dataset single = make_dataset("s", 1, {{0}});
    CHECK(border_points(single, 0).empty());

    const Dataset line = make_dataset("l", 1, {{0}, {1}, {2}, {-3}});
    CHECK(border_points(line, 0) == std::vector<PointId>{1, 3});

    CHECK_THROWS_AS(border_points(line, 9), std::invalid_argument);
}

TEST_CASE("border_points: no border box is contained in another (random data)") {
    std::mt19937_64 rng(13);
    const Dataset D = rand_dataset(rng, 30, 2, 1000);
    for (PointId p = 0; p < 6; ++p) {
        const auto B = border_points(D, p);
        CHECK(!B.empty());
        for (PointId b : B) {
            const AxisBox bb = dom_box(D[p], D[b]);
            for (const Point& other : D.points) {
                if (other.id == p || other.id == b) continue;
                const AxisBox ob = dom_box(D[p], other);
                bool contained = true;
                for (int i = 0; i < 2 && contained; ++i)
                    if (bb.dims[static_cast<size_t>(i)].lo < ob.dims[static_cast<size_t>(i)].lo ||
                        bb.dims[static_cast<size_t>(i)].hi > ob.dims[static_cast<size_t>(i)].hi)
                        contained = false;
                CHECK_FALSE(contained);
            }
        }
    }
}

TEST_CASE("border_points: bucketed 2-D path equals the direct rule") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        // small grids force sign ties and axis-aligned pairs
        const Dataset D = rand_dataset(rng, 24, 2, iter % 2 ? 6 : 300);
        for (PointId p = 0; p < 8; ++p)
            CHECK(border_points(D, p) == borders_naive(D, p));
    }
}

TEST_CASE("border_points contain the skyline at the generator") {
    std::mt19937_64 rng(19);
    for (int iter = 0; iter < 20; ++iter) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const Dataset D = rand_dataset(rng, 25, d, 40);
        for (PointId p = 0; p < 5; ++p) {
            const auto B = border_points(D, p);
            // skyline of D \ {p} with the query at p
            std::vector<std::vector<Coord>> rest;
            std::vector<PointId> rest_ids;
            for (const Point& c : D.points)
                if (c.id != p) {
                    std::vector<Coord> units(c.coords);
                    for (auto& v : units) v /= 2;
                    rest.push_back(units);
                    rest_ids.push_back(c.id);
                }
            const Dataset Drest = make_dataset("rest", d, rest);
            std::vector<Coord> qunits(D[p].coords);
            for (auto& v : qunits) v /= 2;
            for (PointId s : dynamic_skyline(Drest, qu(qunits))) {
                const PointId orig = rest_ids[static_cast<size_t>(s)];
                if (D[orig].coords == D[p].coords) continue;  // duplicate of p
                CHECK(std::binary_search(B.begin(), B.end(), orig));
            }
        }
    }
}

TEST_CASE("client_filter: idempotence and exactness") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 30; ++iter) {
        const Dataset D = rand_dataset(rng, 50, 2, 100);
        const Query q = rand_query(rng, 2, 100);
        const auto sky = dynamic_skyline(D, q);
        CHECK(client_filter(D, sky, q) == sky);

        std::vector<PointId> noisy = sky;
        for (int j = 0; j < 5; ++j)
            noisy.push_back(static_cast<PointId>(rng() % D.size()));
        std::sort(noisy.begin(), noisy.end());
        noisy.erase(std::unique(noisy.begin(), noisy.end()), noisy.end());
        CHECK(client_filter(D, noisy, q) == sky);
    }
}

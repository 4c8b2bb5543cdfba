#include "skytile/region.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace skytile;
using namespace skytile::testutil;

namespace {

bool ref_in_dom_region(const Point& p, const Point& p2, const Query& q) {
    // p2 dominates p at q, straight from the definition
    return ref_dominates(p2, p, q);
}

std::vector<PointId> all_ids(const Dataset& D) {
    std::vector<PointId> ids(D.size());
    for (size_t i = 0; i < D.size(); ++i) ids[i] = static_cast<PointId>(i);
    return ids;
}

}  // namespace

TEST_CASE("domination_region: facet and corner exclusions") {
    const Point p = pt(0, {0, 0});
    SUBCASE("one differing dimension excludes the whole facet") {
        const DomRegion r = domination_region(p, pt(1, {2, 0}));
        CHECK(r.excluded.dims[0].lo == 2);
        CHECK(r.excluded.dims[0].hi == 2);
        CHECK(r.excluded.dims[1].lo == -kDefaultInf);
        for (Coord x = -16; x <= 16; ++x)
            for (Coord y = -16; y <= 16; ++y) {
                const Query q = qh({x, y});
                CHECK(r.contains(q) == ref_in_dom_region(p, pt(1, {2, 0}), q));
            }
    }
    SUBCASE("two differing dimensions exclude only the corner") {
        const DomRegion r = domination_region(p, pt(1, {2, 2}));
        CHECK(r.contains(qh({2, 3})));       // on facet, strict in y
        CHECK_FALSE(r.contains(qh({2, 2})));  // the midpoint corner
        for (Coord x = -16; x <= 16; ++x)
            for (Coord y = -16; y <= 16; ++y) {
                const Query q = qh({x, y});
                CHECK(r.contains(q) == ref_in_dom_region(p, pt(1, {2, 2}), q));
            }
    }
    SUBCASE("identical points give the empty region") {
        const DomRegion r = domination_region(p, pt(1, {0, 0}));
        CHECK(r.empty);
        CHECK_FALSE(r.contains(qh({0, 0})));
    }
}

TEST_CASE("skyline_region: singleton dataset covers all space with no planes") {
    const Dataset D = make_dataset("s", 2, {{3, 4}});
    const SkylineRegion r = skyline_region(D, 0);
    CHECK(r.planes.empty());
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) CHECK(r.contains(rand_query(rng, 2, 100)));
}

TEST_CASE("skyline_region: 1-D pair with tie exception at the midpoint") {
    const Dataset D = make_dataset("p", 1, {{0}, {4}});
    const SkylineRegion r = skyline_region(D, 0);
    REQUIRE(r.planes.size() == 1);
    CHECK(r.planes[0].dim == 0);
    CHECK(r.planes[0].coord == 4);  // q = 2 in original units
    CHECK(r.planes[0].generator == 0);
    CHECK(r.planes[0].exceptions.dims[0].lo == 4);
    CHECK(r.contains(qh({3})));
    CHECK(r.contains(qh({4})));       // tie: 0 still a skyline point at 2
    CHECK_FALSE(r.contains(qh({5})));  // strictly beyond the midpoint
}

TEST_CASE("skyline_region membership equals oracle membership") {
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 8; ++iter) {
        const int d = 1 + (iter % 3);
        const Dataset D = rand_dataset(rng, 12, d, iter % 2 ? 8 : 500);
        for (PointId p = 0; p < 3; ++p) {
            const SkylineRegion r = skyline_region(D, p);
            for (int j = 0; j < 1500; ++j) {
                const Query q = rand_query(rng, d, iter % 2 ? 8 : 500);
                const auto sky = ref_skyline(D, q);
                CHECK(r.contains(q) == std::binary_search(sky.begin(), sky.end(), p));
            }
        }
    }
}

TEST_CASE("regions built from border points match regions built from all of D") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        const int d = 1 + (iter % 3);
        // small grids make coordinate ties common
        const Dataset D = rand_dataset(rng, 18, d, 6);
        for (PointId p = 0; p < 6; ++p) {
            const SkylineRegion from_borders = skyline_region(D, p);
            const SkylineRegion from_all = skyline_region_from(D, p, all_ids(D));
            // membership must agree everywhere, including on plane coordinates
            for (int j = 0; j < 800; ++j) {
                const Query q = rand_query(rng, d, 6);
                CHECK(from_borders.contains(q) == from_all.contains(q));
            }
            for (const SkylineHyperPlane& h : from_all.planes) {
                std::vector<Coord> qc(static_cast<size_t>(d));
                for (int i = 0; i < d; ++i)
                    qc[static_cast<size_t>(i)] = rand_query(rng, 1, 6)[0];
                qc[static_cast<size_t>(h.dim)] = h.coord;
                const Query q{std::move(qc)};
                CHECK(from_borders.contains(q) == from_all.contains(q));
            }
        }
    }
}

TEST_CASE("plane extents end on other planes of the region or at the domain bound") {
    std::mt19937_64 rng(37);
    for (int iter = 0; iter < 10; ++iter) {
        const Dataset D = rand_dataset(rng, 14, 2, 400);
        for (PointId p = 0; p < 4; ++p) {
            const SkylineRegion r = skyline_region(D, p);
            for (const SkylineHyperPlane& h : r.planes) {
                const int od = 1 - h.dim;
                std::vector<Coord> other_coords{-kDefaultInf, kDefaultInf};
                for (const SkylineHyperPlane& o : r.planes)
                    if (o.dim == od) other_coords.push_back(o.coord);
                const Interval ext = h.extent[static_cast<size_t>(od)];
                CHECK(std::count(other_coords.begin(), other_coords.end(), ext.lo) > 0);
                CHECK(std::count(other_coords.begin(), other_coords.end(), ext.hi) > 0);
            }
        }
    }
}

TEST_CASE("flip intervals mark exactly where membership changes across a plane") {
    std::mt19937_64 rng(41);
    for (int iter = 0; iter < 6; ++iter) {
        const Dataset D = rand_dataset(rng, 12, 2, 60);
        for (PointId p = 0; p < 4; ++p) {
            const SkylineRegion r = skyline_region(D, p);
            for (const SkylineHyperPlane& h : r.planes) {
                const int od = 1 - h.dim;
                for (int j = 0; j < 60; ++j) {
                    const Coord y = rand_query(rng, 1, 60)[0];
                    std::vector<Coord> lo2(2), hi2(2);
                    lo2[static_cast<size_t>(h.dim)] = 2 * h.coord - 1;
                    hi2[static_cast<size_t>(h.dim)] = 2 * h.coord + 1;
                    lo2[static_cast<size_t>(od)] = 2 * y + 1;  // keep off other planes
                    hi2[static_cast<size_t>(od)] = 2 * y + 1;
                    const bool before = r.contains2(lo2);
                    const bool after = r.contains2(hi2);
                    bool in_flips = false;
                    for (const Interval& f : h.flips)
                        if (2 * f.lo < 2 * y + 1 && 2 * y + 1 < 2 * f.hi) in_flips = true;
                    CHECK(in_flips == (before != after));
                }
            }
        }
    }
}

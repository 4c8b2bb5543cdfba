#pragma once

#include "skytile/core.hpp"

namespace skytile {

// Domination region D_{p2}^{p}: the axis-parallel box Z anchored at the
// midpoint, minus the boundary subspace where every dimension ties (there the
// strict-dimension requirement fails).
struct DomRegion {
    bool empty = false;
    AxisBox box;       // Z
    AxisBox excluded;  // tie subspace: degenerate [m,m] in differing dims, full elsewhere

    bool contains(const Query& q) const;
};

DomRegion domination_region(const Point& p, const Point& p2, Coord inf = kDefaultInf);

// One border pair's box in compact form: per dimension the side of the border
// point relative to the generator and the (half-unit) midpoint.
struct BorderBox {
    PointId border = -1;
    std::vector<int8_t> side;  // -1, 0, +1
    std::vector<Coord> mid;    // valid where side != 0

    // Membership of a query given in doubled (quarter-unit) coordinates, so
    // cell centers are exactly representable. Covers the tie exclusion.
    bool dominated2(std::span<const Coord> q2) const;
    // Membership in the box Z alone (no tie exclusion).
    bool in_box2(std::span<const Coord> q2) const;
};

// Axis-parallel hyper-plane of a skyline region. Exactly one dimension is
// degenerate (min==max at `coord`). The generator is the region's point; the
// exceptions box is the tie subspace of the generating border pair, the locus
// where the generator can remain a skyline point on the dominated side.
struct SkylineHyperPlane {
    int dim = 0;
    Coord coord = 0;
    PointId generator = -1;
    PointId border = -1;
    std::vector<Interval> extent;    // extent[dim] == [coord, coord]
    AxisBox exceptions;              // tie subspace E of the pair
    // d == 2 only: exact intervals of the other dimension over which crossing
    // this plane flips the generator's region membership.
    std::vector<Interval> flips;
};

struct SkylineRegion {
    PointId generator = -1;
    int dim = 0;
    Coord inf = kDefaultInf;
    std::vector<BorderBox> borders;
    std::vector<SkylineHyperPlane> planes;

    // Exact membership: q is in the region iff no border pair dominates the
    // generator at q. Valid everywhere, tie boundaries included.
    bool contains(const Query& q) const;
    bool contains2(std::span<const Coord> q2) const;
};

// Builds the skyline region of D[p] from its border points (Alg. GetSkylineRegion).
SkylineRegion skyline_region(const Dataset& D, PointId p, Coord inf = kDefaultInf);

// Same construction from an explicit border set (used by tests to compare a
// region built from all of D with one built from the border points only).
SkylineRegion skyline_region_from(const Dataset& D, PointId p,
                                  const std::vector<PointId>& borders,
                                  Coord inf = kDefaultInf);

}  // namespace skytile

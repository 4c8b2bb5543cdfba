#pragma once

#include "skytile/core.hpp"

namespace skytile {

// Brute-force reference implementations. These are the ground truth for every
// other module's tests, the client-side filter, and the border-point
// subroutine. Deliberately simple: O(n^2) pairwise scans.

// S = {p in D | no p' in D dominates p w.r.t. q}. Returns sorted point ids.
std::vector<PointId> dynamic_skyline(const Dataset& D, const Query& q);

// Border points of p: the points whose domination box w.r.t. p is not
// strictly contained in another's. Computed per quadrant around p; a point
// p2 is eliminated only when some other point b lies strictly between p and
// p2 in every dimension where b differs from p (same side). Ties are kept,
// so no candidate that can shape the union of domination regions is lost.
std::vector<PointId> border_points(const Dataset& D, PointId p);

// Skyline restricted to an explicit candidate point set. When candidates
// contain the full skyline at q, the result equals it exactly.
std::vector<Point> client_filter(const std::vector<Point>& candidates, const Query& q);
std::vector<PointId> client_filter(const Dataset& D, const std::vector<PointId>& candidates,
                                   const Query& q);

// O(n log n) planar dynamic skyline used by the benchmark at large n.
// Cross-checked against dynamic_skyline in the test suite.
std::vector<PointId> dynamic_skyline_fast2d(const Dataset& D, const Query& q);

}  // namespace skytile

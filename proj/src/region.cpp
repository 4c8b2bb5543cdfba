#include "skytile/region.hpp"

#include "skytile/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace skytile {

bool DomRegion::contains(const Query& q) const {
    if (empty) return false;
    if (!box.contains(q)) return false;
    return !excluded.contains(q);
}

DomRegion domination_region(const Point& p, const Point& p2, Coord inf) {
    require_same_dim(p.dim(), p2.dim());
    DomRegion r;
    if (p.coords == p2.coords) {
        r.empty = true;
        return r;
    }
    r.box = dom_box(p, p2, inf);
    const Point m = midpoint(p, p2, inf);
    r.excluded.dims.resize(p.coords.size());
    for (int i = 0; i < p.dim(); ++i) {
        auto& iv = r.excluded.dims[static_cast<size_t>(i)];
        if (p[i] != p2[i])
            iv = Interval{m[i], m[i], true, true};
        else
            iv = Interval::full(inf);
    }
    return r;
}

bool BorderBox::in_box2(std::span<const Coord> q2) const {
    for (size_t j = 0; j < side.size(); ++j) {
        if (side[j] == 0) continue;
        const Coord m2 = mid[j] * 2;
        if (side[j] > 0 ? q2[j] < m2 : q2[j] > m2) return false;
    }
    return true;
}

bool BorderBox::dominated2(std::span<const Coord> q2) const {
    bool strict = false;
    for (size_t j = 0; j < side.size(); ++j) {
        if (side[j] == 0) continue;
        const Coord m2 = mid[j] * 2;
        if (side[j] > 0 ? q2[j] < m2 : q2[j] > m2) return false;
        if (q2[j] != m2) strict = true;
    }
    return strict;
}

bool SkylineRegion::contains2(std::span<const Coord> q2) const {
    for (const BorderBox& b : borders)
        if (b.dominated2(q2)) return false;
    return true;
}

bool SkylineRegion::contains(const Query& q) const {
    std::vector<Coord> q2(q.coords.size());
    for (size_t i = 0; i < q2.size(); ++i) q2[i] = q.coords[i] * 2;
    return contains2(q2);
}

namespace {

// Interval set helpers over closed half-unit intervals. Only interior
// coverage matters for flip computation; endpoints are grid breakpoints.
struct Seg {
    Coord lo, hi;
};

// Computes the maximal intervals over which crossing the plane
// {q[dim] == coord} flips membership in the union of the borders' boxes.
// A box whose dim-interval starts (ends) exactly at coord covers only the
// upper (lower) side; a box spanning coord covers both and masks any flip.
// d == 2 only; `other` is the non-degenerate dimension.
std::vector<Interval> flip_intervals(const std::vector<BorderBox>& borders, int dim,
                                     Coord coord, int other, Coord inf) {
    struct Ev {
        Coord y;
        int kind;   // 0 plus, 1 minus, 2 both
        int delta;  // +1 open, -1 close
    };
    std::vector<Ev> evs;
    for (const BorderBox& b : borders) {
        int kind;
        if (b.side[static_cast<size_t>(dim)] == 0) {
            kind = 2;  // full range in dim: spans both sides
        } else {
            const Coord m = b.mid[static_cast<size_t>(dim)];
            const bool opens_up = b.side[static_cast<size_t>(dim)] > 0;
            if (m == coord)
                kind = opens_up ? 0 : 1;
            else if (opens_up ? m < coord : m > coord)
                kind = 2;  // interval strictly spans coord
            else
                continue;  // box does not reach the plane
        }
        Coord ylo = -inf, yhi = inf;
        if (b.side[static_cast<size_t>(other)] > 0)
            ylo = b.mid[static_cast<size_t>(other)];
        else if (b.side[static_cast<size_t>(other)] < 0)
            yhi = b.mid[static_cast<size_t>(other)];
        if (ylo > yhi) continue;
        evs.push_back({ylo, kind, +1});
        evs.push_back({yhi, kind, -1});
    }
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.y < b.y; });

    std::vector<Interval> out;
    int cnt[3] = {0, 0, 0};
    size_t i = 0;
    Coord prev = -inf;
    bool in_flip = false;
    Coord flip_start = 0;
    auto emit_gap = [&](Coord lo, Coord hi) {
        if (lo >= hi) return;
        const bool flips = cnt[2] == 0 && ((cnt[0] > 0) != (cnt[1] > 0));
        if (flips && !in_flip) {
            in_flip = true;
            flip_start = lo;
        } else if (!flips && in_flip) {
            in_flip = false;
            out.push_back(Interval{flip_start, lo, true, true});
        }
    };
    while (i < evs.size()) {
        const Coord y = evs[i].y;
        emit_gap(prev, y);
        while (i < evs.size() && evs[i].y == y) {
            cnt[evs[i].kind] += evs[i].delta;
            ++i;
        }
        prev = y;
    }
    emit_gap(prev, inf);
    if (in_flip) out.push_back(Interval{flip_start, inf, true, true});
    return out;
}

// Paper-style extent clipping for d != 2: shrink the facet hull in each free
// dimension while its extreme slice is entirely covered by some other border
// box. Endpoint candidates are the other boxes' midpoints.
std::vector<Interval> clipped_extent(const std::vector<BorderBox>& borders, size_t self,
                                     int dim, Coord coord, Coord inf) {
    const BorderBox& own = borders[self];
    const int d = static_cast<int>(own.side.size());
    std::vector<Interval> extent(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
        if (j == dim) {
            extent[static_cast<size_t>(j)] = Interval{coord, coord, true, true};
            continue;
        }
        Coord lo = -inf, hi = inf;
        if (own.side[static_cast<size_t>(j)] > 0)
            lo = own.mid[static_cast<size_t>(j)];
        else if (own.side[static_cast<size_t>(j)] < 0)
            hi = own.mid[static_cast<size_t>(j)];
        extent[static_cast<size_t>(j)] = Interval{lo, hi, true, true};
    }

    // A box b' covers the facet slice at extent end `e` of dimension j when
    // it spans the plane's coordinate, contains e in dimension j, and spans
    // the current extent in every other free dimension.
    auto covered_by = [&](const BorderBox& b, int j, Coord e) {
        if (b.side[static_cast<size_t>(dim)] != 0) {
            const Coord m = b.mid[static_cast<size_t>(dim)];
            if (b.side[static_cast<size_t>(dim)] > 0 ? m >= coord : m <= coord) return false;
        }
        for (int t = 0; t < d; ++t) {
            if (t == dim) continue;
            Coord blo = -inf, bhi = inf;
            if (b.side[static_cast<size_t>(t)] > 0)
                blo = b.mid[static_cast<size_t>(t)];
            else if (b.side[static_cast<size_t>(t)] < 0)
                bhi = b.mid[static_cast<size_t>(t)];
            if (t == j) {
                if (e < blo || e > bhi) return false;
            } else {
                if (blo > extent[static_cast<size_t>(t)].lo ||
                    bhi < extent[static_cast<size_t>(t)].hi)
                    return false;
            }
        }
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int j = 0; j < d; ++j) {
            if (j == dim) continue;
            auto& iv = extent[static_cast<size_t>(j)];
            for (size_t s = 0; s < borders.size(); ++s) {
                if (s == self) continue;
                const BorderBox& b = borders[s];
                if (b.side[static_cast<size_t>(j)] == 0) continue;
                const Coord m = b.mid[static_cast<size_t>(j)];
                if (m <= iv.lo || m >= iv.hi) continue;
                if (b.side[static_cast<size_t>(j)] > 0 && covered_by(b, j, iv.hi)) {
                    iv.hi = m;
                    changed = true;
                } else if (b.side[static_cast<size_t>(j)] < 0 && covered_by(b, j, iv.lo)) {
                    iv.lo = m;
                    changed = true;
                }
            }
        }
    }
    return extent;
}

}  // namespace

SkylineRegion skyline_region_from(const Dataset& D, PointId p,
                                  const std::vector<PointId>& border_ids, Coord inf) {
    if (p < 0 || static_cast<size_t>(p) >= D.size())
        throw std::invalid_argument("skyline_region: p not in dataset");
    const Point& g = D[p];
    SkylineRegion region;
    region.generator = p;
    region.dim = D.dim;
    region.inf = inf;
    region.borders.reserve(border_ids.size());
    for (PointId bid : border_ids) {
        const Point& b = D[bid];
        if (b.coords == g.coords) continue;  // duplicates never dominate
        BorderBox bb;
        bb.border = bid;
        bb.side.resize(static_cast<size_t>(D.dim));
        bb.mid.resize(static_cast<size_t>(D.dim));
        const Point m = midpoint(g, b, inf);
        for (int j = 0; j < D.dim; ++j) {
            bb.side[static_cast<size_t>(j)] =
                b[j] == g[j] ? int8_t{0} : (b[j] > g[j] ? int8_t{1} : int8_t{-1});
            bb.mid[static_cast<size_t>(j)] = m[j];
        }
        region.borders.push_back(std::move(bb));
    }

    for (size_t s = 0; s < region.borders.size(); ++s) {
        const BorderBox& bb = region.borders[s];
        for (int i = 0; i < D.dim; ++i) {
            if (bb.side[static_cast<size_t>(i)] == 0) continue;
            SkylineHyperPlane h;
            h.dim = i;
            h.coord = bb.mid[static_cast<size_t>(i)];
            h.generator = p;
            h.border = bb.border;
            h.exceptions.dims.resize(static_cast<size_t>(D.dim));
            for (int j = 0; j < D.dim; ++j) {
                auto& iv = h.exceptions.dims[static_cast<size_t>(j)];
                if (bb.side[static_cast<size_t>(j)] != 0)
                    iv = Interval{bb.mid[static_cast<size_t>(j)], bb.mid[static_cast<size_t>(j)],
                                  true, true};
                else
                    iv = Interval::full(inf);
            }
            if (D.dim == 2) {
                const int other = 1 - i;
                h.flips = flip_intervals(region.borders, i, h.coord, other, inf);
                h.extent.resize(2);
                h.extent[static_cast<size_t>(i)] = Interval{h.coord, h.coord, true, true};
                if (!h.flips.empty()) {
                    h.extent[static_cast<size_t>(other)] =
                        Interval{h.flips.front().lo, h.flips.back().hi, true, true};
                } else {
                    Coord lo = -inf, hi = inf;
                    if (bb.side[static_cast<size_t>(other)] > 0)
                        lo = bb.mid[static_cast<size_t>(other)];
                    else if (bb.side[static_cast<size_t>(other)] < 0)
                        hi = bb.mid[static_cast<size_t>(other)];
                    h.extent[static_cast<size_t>(other)] = Interval{lo, hi, true, true};
                }
            } else {
                h.extent = clipped_extent(region.borders, s, i, h.coord, inf);
            }
            region.planes.push_back(std::move(h));
        }
    }
    return region;
}

SkylineRegion skyline_region(const Dataset& D, PointId p, Coord inf) {
    return skyline_region_from(D, p, border_points(D, p), inf);
}

}  // namespace skytile

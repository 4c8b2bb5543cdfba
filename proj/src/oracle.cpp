#include "skytile/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace skytile {

std::vector<PointId> dynamic_skyline(const Dataset& D, const Query& q) {
    if (D.points.empty()) throw std::invalid_argument("empty dataset");
    require_same_dim(D.dim, q.dim());
    std::vector<PointId> out;
    for (const Point& p : D.points) {
        bool dominated = false;
        for (const Point& p2 : D.points) {
            if (p2.id == p.id) continue;
            if (dominates(p2, p, q)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(p.id);
    }
    return out;
}

namespace {

// b eliminates c as a border candidate of g iff b sits strictly between g and
// c, on the same side, in every dimension where b differs from g. Then the
// domination box of c is contained in b's, tie boundaries included.
bool strictly_shadows(const Point& g, const Point& b, const Point& c) {
    bool differs = false;
    for (int j = 0; j < g.dim(); ++j) {
        if (b[j] == g[j]) continue;
        differs = true;
        const bool b_above = b[j] > g[j];
        const bool c_above = c[j] > g[j];
        if (c[j] == g[j] || b_above != c_above) return false;
        if (abs_dist(b[j], g[j]) >= abs_dist(c[j], g[j])) return false;
    }
    return differs;
}

bool same_coords(const Point& a, const Point& b) {
    return a.coords == b.coords;
}

std::vector<PointId> border_points_2d(const Dataset& D, const Point& g) {
    struct Cand {
        Coord ax, ay;  // |coord - g| per dim
        int sx, sy;    // -1, 0, +1
        PointId id;
    };
    std::vector<Cand> cands;
    cands.reserve(D.size());
    // Minimum axis distance of points lying exactly on an axis through g;
    // such a point shadows everything strictly farther on the same ray side.
    Coord min_on_x[2] = {0, 0};  // sy == 0, indexed by sx sign
    Coord min_on_y[2] = {0, 0};
    bool has_on_x[2] = {false, false};
    bool has_on_y[2] = {false, false};
    for (const Point& c : D.points) {
        if (c.id == g.id || same_coords(c, g)) continue;
        Cand cd;
        cd.ax = abs_dist(c[0], g[0]);
        cd.ay = abs_dist(c[1], g[1]);
        cd.sx = c[0] == g[0] ? 0 : (c[0] > g[0] ? 1 : -1);
        cd.sy = c[1] == g[1] ? 0 : (c[1] > g[1] ? 1 : -1);
        cd.id = c.id;
        cands.push_back(cd);
        if (cd.sy == 0) {
            const int ix = cd.sx > 0 ? 1 : 0;
            if (!has_on_x[ix] || cd.ax < min_on_x[ix]) {
                has_on_x[ix] = true;
                min_on_x[ix] = cd.ax;
            }
        }
        if (cd.sx == 0) {
            const int iy = cd.sy > 0 ? 1 : 0;
            if (!has_on_y[iy] || cd.ay < min_on_y[iy]) {
                has_on_y[iy] = true;
                min_on_y[iy] = cd.ay;
            }
        }
    }

    std::vector<PointId> out;
    // Per quadrant: keep c unless some b has strictly smaller distance in
    // both dimensions (strict-strict Pareto with ties kept), or an on-axis
    // point with matching sign sits strictly nearer in its one differing
    // dimension.
    for (int qx = 0; qx < 2; ++qx) {
        for (int qy = 0; qy < 2; ++qy) {
            const int sx = qx ? 1 : -1;
            const int sy = qy ? 1 : -1;
            const int ix = sx > 0 ? 1 : 0;
            const int iy = sy > 0 ? 1 : 0;
            std::vector<const Cand*> bucket;
            for (const Cand& c : cands)
                if (c.sx == sx && c.sy == sy) bucket.push_back(&c);
            std::sort(bucket.begin(), bucket.end(), [](const Cand* a, const Cand* b) {
                if (a->ax != b->ax) return a->ax < b->ax;
                return a->ay < b->ay;
            });
            Coord best_ay = 0;
            bool has_best = false;
            size_t i = 0;
            while (i < bucket.size()) {
                size_t j = i;
                while (j < bucket.size() && bucket[j]->ax == bucket[i]->ax) ++j;
                for (size_t t = i; t < j; ++t) {
                    const Cand* c = bucket[t];
                    if (has_best && best_ay < c->ay) continue;
                    if (has_on_x[ix] && min_on_x[ix] < c->ax) continue;
                    if (has_on_y[iy] && min_on_y[iy] < c->ay) continue;
                    out.push_back(c->id);
                }
                for (size_t t = i; t < j; ++t)
                    if (!has_best || bucket[t]->ay < best_ay) {
                        has_best = true;
                        best_ay = bucket[t]->ay;
                    }
                i = j;
            }
        }
    }
    // Points on an axis through g are shadowed only by nearer points on the
    // same ray; quadrant points never shadow them (a tie dimension blocks
    // strict containment).
    for (const Cand& c : cands) {
        if (c.sx != 0 && c.sy != 0) continue;
        bool shadowed = false;
        if (c.sy == 0) {
            const int ix = c.sx > 0 ? 1 : 0;
            shadowed = has_on_x[ix] && min_on_x[ix] < c.ax;
        } else {
            const int iy = c.sy > 0 ? 1 : 0;
            shadowed = has_on_y[iy] && min_on_y[iy] < c.ay;
        }
        if (!shadowed) out.push_back(c.id);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<PointId> border_points(const Dataset& D, PointId p) {
    if (p < 0 || static_cast<size_t>(p) >= D.size())
        throw std::invalid_argument("border_points: p not in dataset");
    const Point& g = D[p];
    if (D.dim == 2) return border_points_2d(D, g);

    std::vector<PointId> survivors;
    for (const Point& c : D.points) {
        if (c.id == g.id || same_coords(c, g)) continue;
        bool dead = false;
        for (size_t s = 0; s < survivors.size();) {
            const Point& b = D[survivors[s]];
            if (strictly_shadows(g, b, c)) {
                dead = true;
                break;
            }
            if (strictly_shadows(g, c, b)) {
                survivors[s] = survivors.back();
                survivors.pop_back();
            } else {
                ++s;
            }
        }
        if (!dead) survivors.push_back(c.id);
    }
    std::sort(survivors.begin(), survivors.end());
    return survivors;
}

std::vector<Point> client_filter(const std::vector<Point>& candidates, const Query& q) {
    std::vector<Point> out;
    for (const Point& p : candidates) {
        bool dominated = false;
        for (const Point& p2 : candidates) {
            if (p2.id == p.id) continue;
            if (dominates(p2, p, q)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(p);
    }
    return out;
}

std::vector<PointId> client_filter(const Dataset& D, const std::vector<PointId>& candidates,
                                   const Query& q) {
    std::vector<PointId> out;
    for (PointId a : candidates) {
        bool dominated = false;
        for (PointId b : candidates) {
            if (a == b) continue;
            if (dominates(D[b], D[a], q)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PointId> dynamic_skyline_fast2d(const Dataset& D, const Query& q) {
    if (D.dim != 2) throw std::invalid_argument("dynamic_skyline_fast2d: d must be 2");
    struct Item {
        Coord dx, dy;
        PointId id;
    };
    std::vector<Item> items;
    items.reserve(D.size());
    for (const Point& p : D.points)
        items.push_back({abs_dist(p[0], q[0]), abs_dist(p[1], q[1]), p.id});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.dx != b.dx) return a.dx < b.dx;
        return a.dy < b.dy;
    });
    std::vector<PointId> out;
    Coord best_dy = 0;
    bool has_best = false;
    size_t i = 0;
    while (i < items.size()) {
        size_t j = i;
        while (j < items.size() && items[j].dx == items[i].dx) ++j;
        // Within an equal-dx group only the minimal dy survives (smaller dy
        // dominates); against earlier groups survival requires dy strictly
        // below every earlier dy.
        const Coord group_min = items[i].dy;
        for (size_t t = i; t < j && items[t].dy == group_min; ++t) {
            if (has_best && best_dy <= items[t].dy) continue;
            out.push_back(items[t].id);
        }
        if (!has_best || group_min < best_dy) {
            has_best = true;
            best_dy = group_min;
        }
        i = j;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace skytile
